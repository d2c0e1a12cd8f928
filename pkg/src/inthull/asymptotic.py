"""Right-hand sides with large slack, and feasibility through one basis.

For a fixed A, a right-hand side b is *good* when P(A, b) is empty or every
feasible basis vertex has slack at least (n Delta^max)^2 in each non-basic
row. For good b, integer feasibility of P(A, b) is decided by the mixed
integer hull of the basis cone alone. Bad b lie on finitely many hyperplanes,
so good b have density one; :func:`density_estimate` measures the finite-t
fractions.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .errors import CapExceededError, DimensionError, InternalConsistencyError, PreconditionError, RankError
from .exactla import IntMatrix, RatMatrix, _Matrix, adjugate, delta, det, inverse, rank
from .oracle import Instance, wmip_vertices
from .wsynth import synthesize

DEFAULT_BASIS_CAP = 100_000
DEFAULT_B_CAP = 10**7


def _as_int(A) -> IntMatrix:
    A = A if isinstance(A, IntMatrix) else IntMatrix(A)
    return A


@lru_cache(maxsize=256)
def delta_max(A: IntMatrix) -> int:
    """Largest absolute minor of any size, cached per matrix."""
    return delta(A, mode="max")


@dataclass(frozen=True)
class BasisInfo:
    I: tuple[int, ...]
    det_I: int
    inv_I: RatMatrix
    feasible: bool | None = None


def basis_info(A: _Matrix, I: Sequence[int], b: Sequence[int] | None = None) -> BasisInfo:
    A = _as_int(A)
    I = tuple(sorted(I))
    if len(I) != A.cols:
        raise DimensionError(f"a basis has {A.cols} rows, got {len(I)}")
    AI = A.submatrix(I, range(A.cols))
    d = det(AI)
    if d == 0:
        raise PreconditionError(f"rows {I} are not a basis")
    inv = inverse(AI)
    feas = None
    if b is not None:
        x = _vertex(inv, [b[i] for i in I])
        feas = all(sum(a * v for a, v in zip(A.row(j), x)) <= b[j] for j in range(A.rows))
    return BasisInfo(I, abs(d), inv, feas)


def _vertex(inv: RatMatrix, bI) -> tuple[Fraction, ...]:
    return tuple(sum(inv[r, c] * bI[c] for c in range(len(bI))) for r in range(inv.rows))


# ---------------------------------------------------------------------------
# non-degeneracy


def is_nondegenerate(A: _Matrix, cap: int = DEFAULT_BASIS_CAP) -> bool:
    """True iff every n x n submatrix of A is invertible."""
    A = _as_int(A)
    m, n = A.shape
    if math.comb(m, n) > cap:
        raise CapExceededError(f"{math.comb(m, n)} maximal minors exceed cap {cap}")
    return all(det(A.submatrix(I, range(n))) != 0 for I in itertools.combinations(range(m), n))


def nondeg_row_bound_check(A: _Matrix) -> bool:
    """m <= n + Delta(A)^2, which holds for every non-degenerate A."""
    A = _as_int(A)
    if not is_nondegenerate(A):
        raise PreconditionError("A is degenerate")
    m, n = A.shape
    return m <= n + delta(A) ** 2


# ---------------------------------------------------------------------------
# the good set


class GoodSetChecker:
    """Integer-only evaluation of the slack condition for one matrix.

    For each basis I and row j outside it, ``g = sign(det A_I) A_j adj(A_I)``
    is integral and ``g . b_I = Delta_I A_j A_I^{-1} b_I``, so feasibility and
    the slack test reduce to integer comparisons with ``Delta_I b_j``.
    """

    def __init__(self, A: _Matrix, cap: int = DEFAULT_BASIS_CAP):
        A = _as_int(A)
        m, n = A.shape
        if rank(A) != n:
            raise RankError("need rank(A) = n")
        if math.comb(m, n) > cap:
            raise CapExceededError(f"{math.comb(m, n)} row subsets exceed cap {cap}")
        self.A = A
        self.m, self.n = m, n
        self.delta_max = delta_max(A)
        self.slack = (n * self.delta_max) ** 2
        self.bases = []
        for I in itertools.combinations(range(m), n):
            AI = A.submatrix(I, range(n))
            d = det(AI)
            if d == 0:
                continue
            adj = adjugate(AI)
            sgn = 1 if d > 0 else -1
            forms = []
            for j in range(m):
                if j in I:
                    continue
                Aj = A.row(j)
                g = tuple(sgn * sum(Aj[r] * adj[r, c] for r in range(n)) for c in range(n))
                forms.append((j, g))
            self.bases.append((I, abs(d), tuple(forms)))

    def _check(self, b):
        if len(b) != self.m:
            raise DimensionError(f"b has {len(b)} entries, expected {self.m}")
        feasible, violations = [], []
        for I, D, forms in self.bases:
            vals = [(j, sum(gc * b[i] for gc, i in zip(g, I)), D * b[j]) for j, g in forms]
            if all(lhs <= rhs for _, lhs, rhs in vals):
                feasible.append(I)
                violations.extend((I, j) for j, lhs, rhs in vals if lhs + D * self.slack > rhs)
        return feasible, violations

    def report(self, b: Sequence[int]) -> "GoodSetReport":
        feasible, violations = self._check(tuple(b))
        empty = not feasible
        return GoodSetReport(empty or not violations, tuple(violations), empty, tuple(feasible))

    def is_good(self, b: Sequence[int]) -> bool:
        return self.report(b).in_good_set


@lru_cache(maxsize=64)
def _checker(A: IntMatrix) -> GoodSetChecker:
    return GoodSetChecker(A)


@dataclass(frozen=True)
class GoodSetReport:
    in_good_set: bool
    violations: tuple[tuple[tuple[int, ...], int], ...]
    empty_p: bool
    feasible_bases: tuple[tuple[int, ...], ...] = ()


def in_good_set(A: _Matrix, b: Sequence[int]) -> GoodSetReport:
    return _checker(_as_int(A)).report(b)


def proximity_check(A: _Matrix, b: Sequence[int], I: BasisInfo | Sequence[int], j: int) -> bool:
    """A_j A_I^{-1} b_I + (n Delta^max)^2 <= b_j, evaluated in rationals."""
    A = _as_int(A)
    info = I if isinstance(I, BasisInfo) else basis_info(A, I, b)
    if info.feasible is None:
        info = basis_info(A, info.I, b)
    if not info.feasible:
        raise PreconditionError(f"basis {info.I} is not feasible for b")
    if j in info.I or not 0 <= j < A.rows:
        raise PreconditionError(f"row {j} must be a non-basic row index")
    x = _vertex(info.inv_I, [b[i] for i in info.I])
    lhs = sum(a * v for a, v in zip(A.row(j), x)) + (A.cols * delta_max(A)) ** 2
    return lhs <= b[j]


# ---------------------------------------------------------------------------
# hyperplanes covering the bad right-hand sides


@dataclass(frozen=True)
class BadHyperplane:
    """The hyperplane {b : coeffs . b = r}."""

    I: tuple[int, ...]
    j: int
    r: int
    coeffs: tuple[int, ...]

    def contains(self, b: Sequence[int]) -> bool:
        return sum(c * v for c, v in zip(self.coeffs, b)) == self.r


@dataclass(frozen=True)
class HyperplaneFamily:
    """All hyperplanes for one (I, j): coeffs . b = r for 0 <= r < count."""

    I: tuple[int, ...]
    j: int
    coeffs: tuple[int, ...]
    count: int

    def residue(self, b: Sequence[int]) -> int:
        return sum(c * v for c, v in zip(self.coeffs, b))

    def contains(self, b: Sequence[int]) -> bool:
        return 0 <= self.residue(b) < self.count

    def expand(self) -> list[BadHyperplane]:
        return [BadHyperplane(self.I, self.j, r, self.coeffs) for r in range(self.count)]


def hyperplane_families(A: _Matrix) -> list[HyperplaneFamily]:
    """One family per basis I and row j outside it.

    The equation Delta_I b_j = Delta_I A_j A_I^{-1} b_I + r has integer
    coefficients by Cramer's rule; r runs over 0 .. Delta_I (n Delta^max)^2 - 1.
    """
    chk = _checker(_as_int(A))
    out = []
    for I, D, forms in chk.bases:
        for j, g in forms:
            coeffs = [0] * chk.m
            coeffs[j] = D
            for gc, i in zip(g, I):
                coeffs[i] -= gc
            out.append(HyperplaneFamily(I, j, tuple(coeffs), D * chk.slack))
    return out


def bad_hyperplanes(A: _Matrix, cap: int = 10**6) -> list[BadHyperplane]:
    fams = hyperplane_families(A)
    total = sum(f.count for f in fams)
    if total > cap:
        raise CapExceededError(f"{total} hyperplanes exceed cap {cap}")
    return [h for f in fams for h in f.expand()]


def hyperplanes_through(A: _Matrix, b: Sequence[int]) -> list[BadHyperplane]:
    """The listed hyperplanes that contain b."""
    out = []
    for f in hyperplane_families(A):
        r = f.residue(b)
        if 0 <= r < f.count:
            out.append(BadHyperplane(f.I, f.j, r, f.coeffs))
    return out


# ---------------------------------------------------------------------------
# density


@dataclass(frozen=True)
class DensityEstimate:
    t: int
    mode: str
    total: int
    good: int
    nonempty_good: int
    seed: int | None = None

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.good, self.total) if self.total else Fraction(0)


def density_estimate(
    A: _Matrix,
    t: int,
    mode: str = "enumerate",
    seed: int | None = None,
    samples: int = 10_000,
    cap: int = DEFAULT_B_CAP,
) -> DensityEstimate:
    """Fraction of b in {-t..t}^m that are good, exactly or by sampling.

    Sampling draws ``samples`` vectors uniformly with ``random.Random(seed)``;
    the same seed always gives the same estimate.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    chk = _checker(_as_int(A))
    m = chk.m
    if mode == "enumerate":
        total = (2 * t + 1) ** m
        if total > cap:
            raise CapExceededError(f"{total} right-hand sides exceed cap {cap}")
        source = itertools.product(range(-t, t + 1), repeat=m)
    elif mode == "sample":
        if seed is None:
            raise ValueError("sampling needs an explicit seed")
        rng = random.Random(seed)
        total = samples
        source = (tuple(rng.randint(-t, t) for _ in range(m)) for _ in range(samples))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    good = nonempty = 0
    for b in source:
        rep = chk.report(b)
        if rep.in_good_set:
            good += 1
            nonempty += not rep.empty_p
    return DensityEstimate(t, mode, total, good, nonempty, seed if mode == "sample" else None)


# ---------------------------------------------------------------------------
# reduce and solve


@dataclass(frozen=True)
class Reduction:
    """Outcome of deciding IP(A, b) = empty through one feasible basis.

    ``status`` is ``"infeasible_lp"``, ``"not_applicable"`` or ``"reduced"``.
    For a reduction, ``feasible`` answers whether IP(A, b) is nonempty and
    ``witness`` is an integer point of P(A, b) when it is.
    """

    status: str
    I: tuple[int, ...] | None = None
    W: IntMatrix | None = None
    feasible: bool | None = None
    witness: tuple[int, ...] | None = None
    candidates: tuple[tuple[Fraction, ...], ...] = ()


@lru_cache(maxsize=256)
def _basis_w(AI: IntMatrix) -> IntMatrix:
    return synthesize(AI).W


def reduce_and_solve(A: _Matrix, b: Sequence[int]) -> Reduction:
    """Decide integer feasibility of P(A, b) from the cone of one basis.

    Takes the lexicographically smallest feasible basis I, builds W for the
    square system A_I and enumerates the vertices of W-MIP(A_I, b_I). These
    lie within n Delta^max of the basis vertex in the sup norm, so the cone is
    clipped to a box slightly larger than that. For good b every point that
    close satisfies the remaining rows of A, which is checked.
    """
    A = _as_int(A)
    b = tuple(int(v) for v in b)
    rep = in_good_set(A, b)
    if rep.empty_p:
        return Reduction("infeasible_lp")
    if not rep.in_good_set:
        return Reduction("not_applicable")
    n = A.cols
    I = min(rep.feasible_bases)
    AI = A.submatrix(I, range(n))
    bI = tuple(b[i] for i in I)
    W = _basis_w(AI)
    x_star = _vertex(inverse(AI), bI)
    rad = n * delta_max(A)
    box = tuple((math.floor(x) - rad - 1, math.ceil(x) + rad + 1) for x in x_star)
    verts = wmip_vertices(Instance(AI, bI, box), W)
    near = tuple(z for z in verts if max(abs(zi - xi) for zi, xi in zip(z, x_star)) <= rad)
    rows = [A.row(j) for j in range(A.rows)]
    for z in near:
        if any(sum(a * v for a, v in zip(r, z)) > bj for r, bj in zip(rows, b)):
            raise InternalConsistencyError(f"{z} is close to the basis vertex but outside P")
    hit = next((z for z in near if all(v.denominator == 1 for v in z)), None)
    witness = tuple(int(v) for v in hit) if hit is not None else None
    return Reduction("reduced", I, W, hit is not None, witness, near)
