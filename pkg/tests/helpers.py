"""Seeded instance generators shared by the test modules."""

from __future__ import annotations

import random
from functools import lru_cache

from inthull.exactla import IntMatrix, hnf, rank
from inthull.oracle import recession_directions
from inthull.wsynth import synthesize

SUITE_SEED = 20240611


def random_matrix(rng: random.Random, m: int, n: int, lo: int = -3, hi: int = 3) -> IntMatrix:
    return IntMatrix([[rng.randint(lo, hi) for _ in range(n)] for _ in range(m)])


def random_full_rank(rng, n, m_extra=3, lo=-3, hi=3, max_delta=50):
    while True:
        m = rng.randint(n, n + m_extra)
        A = random_matrix(rng, m, n, lo, hi)
        if rank(A) == n and hnf(A).delta <= max_delta:
            return A


@lru_cache(maxsize=None)
def pipeline_suite(count: int = 200, bounded_small: int = 60, seed: int = SUITE_SEED):
    """Random matrices with n in {2,3,4}, m <= n + 3, entries in [-3, 3], delta <= 50.

    Generation continues past ``count`` until at least ``bounded_small``
    members have n <= 3 and a bounded polyhedron for every b.
    """
    rng = random.Random(seed)
    out = []
    bounded = 0
    while len(out) < count or bounded < bounded_small:
        A = random_full_rank(rng, rng.choice([2, 3, 4]))
        out.append(A)
        if A.cols <= 3 and not recession_directions(A):
            bounded += 1
    return tuple(out)


@lru_cache(maxsize=None)
def synthesized(A: IntMatrix):
    return synthesize(A)


def random_unimodular(rng: random.Random, n: int, steps: int = 10, bound: int = 2) -> IntMatrix:
    """Product of at most ``steps`` elementary column operations."""
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(rng.randint(1, steps)):
        kind = rng.random()
        i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if kind < 0.6 and n > 1:
            c = rng.choice([c for c in range(-bound, bound + 1) if c])
            for row in U:
                row[j] += c * row[i]
        elif kind < 0.8 and n > 1:
            for row in U:
                row[i], row[j] = row[j], row[i]
        else:
            for row in U:
                row[i] = -row[i]
    return IntMatrix(U)
