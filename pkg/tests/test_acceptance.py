"""Acceptance criteria 1-11. Each test prints one PASS/FAIL line."""

import itertools
import math
import random
import time
from fractions import Fraction

import sympy

from helpers import pipeline_suite, random_unimodular, synthesized
from inthull.asymptotic import (
    bad_hyperplanes,
    density_estimate,
    in_good_set,
    is_nondegenerate,
    nondeg_row_bound_check,
    reduce_and_solve,
)
from inthull.covering import PointSet, choose_k, cover_box, verify_cover
from inthull.errors import RankError
from inthull.exactla import (
    IntMatrix,
    decompose,
    delta,
    det,
    distinct_columns,
    hnf,
    independent_rows,
    inverse,
    parallelepiped_points,
)
from inthull.oracle import Instance, integer_hull_points, integrality_number_bruteforce, polyhedron_vertices
from inthull.oracle import recession_directions, verify_integrality
from inthull.wsynth import c_bound, certify_w, group_reduce, is_tu

REL_GUARD = 1e-9
EXAMPLE = IntMatrix([[1, 0, 0], [0, 1, 0], [2, 4, 5], [1, 4, 4], [2, 2, 3]])


def bounded_small():
    return [A for A in pipeline_suite() if A.cols <= 3 and not recession_directions(A)]


def nonempty_b(rng, A, lo=-6, hi=6, tries=200):
    for _ in range(tries):
        b = tuple(rng.randint(lo, hi) for _ in range(A.rows))
        if not polyhedron_vertices(Instance(A, b)).infeasible:
            return b
    return None


# -- 1 -------------------------------------------------------------------------


def test_criterion_01_worked_example_delta(acceptance):
    t0 = time.perf_counter()
    d_full = delta(EXAMPLE, mode="full_rank")
    d_a2 = delta(EXAMPLE.submatrix([3, 4]), mode="full_rank")
    elapsed = time.perf_counter() - t0
    ok = d_full == 5 and d_a2 == 6 and elapsed < 1.0
    acceptance(1, "worked example delta(A) = 5, delta(A2) = 6", ok, f"got {d_full}, {d_a2} in {elapsed:.3f}s")
    assert ok


# -- 2 -------------------------------------------------------------------------


def w_row_bound_reference(A, h):
    d = h.delta
    r = h.a2.rows
    c = c_bound(r, delta(A))
    if r:
        try:
            c = min(c, c_bound(r, delta(h.a2)))
        except RankError:  # A2 is a zero block
            c = min(c, c_bound(r, 1))
    return (4 * math.sqrt(d) + math.log2(d)) * c


def test_criterion_02_w_row_bound(acceptance):
    t0 = time.perf_counter()
    suite = pipeline_suite()
    violations = []
    worst = 0.0
    for A in suite:
        n = A.cols
        assert n in (2, 3, 4) and A.rows <= n + 3
        assert all(-3 <= x <= 3 for row in A for x in row)
        s = synthesized(A)
        h = hnf(A)
        assert h.delta <= 50
        certify_w(A, s.W)  # raises unless W certifies
        bound = w_row_bound_reference(A, h)
        if s.report.k > bound * (1 + REL_GUARD):
            violations.append(A.tolist())
        worst = max(worst, s.report.k / bound)
    elapsed = time.perf_counter() - t0
    ok = len(suite) >= 200 and not violations and elapsed < 300
    acceptance(
        2,
        "synthesized W certified with k within the row bound",
        ok,
        f"{len(suite)} matrices, {len(violations)} violations, max k/bound {worst:.3f}, {elapsed:.1f}s",
    )
    assert ok


# -- 3 -------------------------------------------------------------------------


def test_criterion_03_oracle_equivalence(acceptance):
    t0 = time.perf_counter()
    rng = random.Random(3)
    tested = failures = 0
    for A in bounded_small():
        b = nonempty_b(rng, A)
        if b is None:
            continue
        tested += 1
        if not verify_integrality(Instance(A, b), synthesized(A).W):
            failures += 1
    elapsed = time.perf_counter() - t0
    ok = tested >= 50 and failures == 0 and elapsed < 600
    acceptance(3, "W-MIP vertices integral for synthesized W", ok, f"{tested} instances, {failures} failures, {elapsed:.1f}s")
    assert ok


# -- 4 -------------------------------------------------------------------------


def test_criterion_04_total_unimodularity(acceptance):
    checked = disagree = not_tu = exhaustive = 0
    for A in pipeline_suite():
        f = synthesized(A).factorization
        if f is None or f.W.rows == 0:
            continue
        W = f.W
        ex = bool(is_tu(W, "exhaustive"))
        gh = bool(is_tu(W, "ghouila_houri"))
        checked += 1
        exhaustive += W.rows <= 6
        disagree += ex != gh
        not_tu += not ex
    ok = checked > 0 and disagree == 0 and not_tu == 0
    acceptance(
        4,
        "every build_w output is TU, both methods agree",
        ok,
        f"{checked} matrices ({exhaustive} with k <= 6), {disagree} disagreements, {not_tu} not TU",
    )
    assert ok


# -- 5 -------------------------------------------------------------------------


def sorted_tuples(limit=10**4, max_len=6):
    def rec(prefix, prod, lo):
        if prefix:
            yield tuple(prefix)
        if len(prefix) == max_len:
            return
        a = lo
        while prod * a <= limit:
            prefix.append(a)
            yield from rec(prefix, prod * a, a)
            prefix.pop()
            a += 1

    yield from rec([], 1, 2)


def lam_matrix(alphas, rng=None):
    l = len(alphas)
    return IntMatrix(
        [
            [alphas[i] if i == j else (rng.randrange(alphas[i]) if rng and j < i else 0) for j in range(l)]
            for i in range(l)
        ]
    )


def test_criterion_05_box_cover_bound(acceptance):
    t0 = time.perf_counter()
    rng = random.Random(5)
    tuples = list(sorted_tuples())
    # full coverage checks: every tuple with delta <= 64 plus a seeded sample of larger ones
    large = [a for a in tuples if math.prod(a) > 64]
    sample = set(rng.sample(large, 40))
    upper = lower = built = verified = 0
    for alphas in tuples:
        d = math.prod(alphas)
        kc = choose_k(alphas)
        if kc.cost > (4 * math.sqrt(d) + math.log2(d)) * (1 + REL_GUARD):
            upper += 1
        if kc.cost < math.isqrt(d - 1) + 1:
            lower += 1
        if d <= 1000 or rng.random() < 0.01:
            cv = cover_box(lam_matrix(alphas), kc, points=[])
            upper += cv.cost != kc.cost
            built += 1
        if d <= 64 or alphas in sample:
            L = lam_matrix(alphas, rng)
            C = PointSet(len(alphas), PointSet.psi(alphas).points + tuple(L.col(j) for j in range(len(alphas))))
            cv = cover_box(L, kc)
            upper += not verify_cover(C, cv)
            lower += cv.cost < math.isqrt(len(C) - 1) + 1
            verified += 1
    elapsed = time.perf_counter() - t0
    ok = upper == 0 and lower == 0 and elapsed < 60
    acceptance(
        5,
        "box cover cost between ceil(sqrt(delta)) and 4 sqrt(delta) + log2(delta)",
        ok,
        f"{len(tuples)} tuples, {built} built, {verified} verified, "
        f"{upper} upper / {lower} lower violations, {elapsed:.1f}s",
    )
    assert ok


# -- 6 -------------------------------------------------------------------------


def test_criterion_06_parallelepiped(acceptance):
    rng = random.Random(6)
    mats = []
    while len(mats) < 20:
        n = rng.choice([1, 2, 3])
        B = IntMatrix([[rng.randint(-5, 5) for _ in range(n)] for _ in range(n)])
        if 0 < abs(det(B)) <= 50:
            mats.append(B)
    count_ok = all(len(parallelepiped_points(B)) == abs(det(B)) for B in mats)
    dec_ok = True
    for k in range(100):
        B = mats[k % 20]
        n = B.rows
        v = tuple(rng.randint(-30, 30) for _ in range(n))
        lam, tau = decompose(B, v)
        coeff = sympy.Matrix(B.tolist()).inv() * sympy.Matrix(v)
        # uniqueness: lambda is the fractional part of B^-1 v, tau its floor
        dec_ok &= [Fraction(int(c.p), int(c.q)) - math.floor(c) for c in coeff] == list(lam)
        dec_ok &= [math.floor(c) for c in coeff] == list(tau)
        dec_ok &= all(0 <= x < 1 for x in lam)
    ok = count_ok and dec_ok
    acceptance(6, "parallelepiped has |det B| points, decomposition unique", ok, "20 matrices, 100 vectors")
    assert ok


# -- 7 -------------------------------------------------------------------------


def test_criterion_07_group_reduction(acceptance):
    cases = []
    for A in pipeline_suite():
        h = hnf(A)
        if h.ell >= 1 and h.a2.rows >= 1 and h.delta <= 20:
            cases.append((A, h))
        if len(cases) == 20:
            break
    bad = []
    for A, h in cases:
        # the pipeline keeps a maximal independent set of rows of A2
        a2_bar = h.a2.submatrix(independent_rows(h.a2))
        Y = a2_bar @ inverse(h.top)
        g = group_reduce(h.top, Y)
        EY = g.E @ Y
        dA = delta(A)
        good = EY.is_integral() and abs(det(g.E)) <= h.delta
        if good and any(x for row in EY for x in row):
            good = delta(EY.to_int()) <= dA
        good = good and distinct_columns(Y)[0] <= c_bound(Y.rows, dA)
        if not good:
            bad.append(A.tolist())
    ok = len(cases) == 20 and not bad
    acceptance(7, "group reduction keeps EY integral with bounded det and delta", ok, f"{len(cases)} cases, {len(bad)} failures")
    assert ok


# -- 8 -------------------------------------------------------------------------


def test_criterion_08_unimodular_invariance(acceptance):
    rng = random.Random(8)
    pairs = mismatches = delta_changes = 0
    for A in bounded_small()[:20]:
        n = A.cols
        U = random_unimodular(rng, n)
        assert abs(det(U)) == 1
        AU = A @ U
        delta_changes += delta(AU) != delta(A)
        b = nonempty_b(rng, A)
        if b is None:
            continue
        weak = IntMatrix([[rng.randint(-1, 1) for _ in range(n)]])
        for W in (synthesized(A).W, IntMatrix([], cols=n), weak):
            WU = W @ U if W.rows else W
            lhs = verify_integrality(Instance(A, b), W)
            rhs = verify_integrality(Instance(AU, b), WU)
            mismatches += lhs != rhs
            pairs += 1
    ok = delta_changes == 0 and mismatches == 0 and pairs >= 20
    acceptance(
        8,
        "delta and W-MIP integrality invariant under unimodular maps",
        ok,
        f"{pairs} (b, W) pairs, {mismatches} mismatches, {delta_changes} delta changes",
    )
    assert ok


# -- 9 -------------------------------------------------------------------------

GOOD_SET_INSTANCES = {
    "tu": IntMatrix([[1, 0], [0, 1], [-1, 0], [1, -1]]),
    "diamond": IntMatrix([[1, 1], [1, -1], [-1, 1], [-1, -1]]),
}


def test_criterion_09_good_set(acceptance):
    t0 = time.perf_counter()
    table = []
    outside = disagree = nonempty_good_total = 0
    for name, A in GOOD_SET_INSTANCES.items():
        assert A.shape == (4, 2) and not recession_directions(A)
        eqs = {}
        for h in bad_hyperplanes(A):
            eqs.setdefault(h.coeffs, set()).add(h.r)
        for t in (3, 5, 8):
            good = nonempty_good = 0
            for b in itertools.product(range(-t, t + 1), repeat=4):
                rep = in_good_set(A, b)
                if rep.empty_p:
                    good += 1
                    continue
                if not rep.in_good_set:
                    if not any(sum(c * v for c, v in zip(co, b)) in rs for co, rs in eqs.items()):
                        outside += 1
                    continue
                good += 1
                nonempty_good += 1
                red = reduce_and_solve(A, b)
                hull = integer_hull_points(Instance(A, b), hull=False)
                disagree += red.status != "reduced" or red.feasible != (not hull.empty)
            est = density_estimate(A, t)
            assert est.good == good and est.total == (2 * t + 1) ** 4
            nonempty_good_total += nonempty_good
            table.append(f"{name} t={t}: {est.fraction} ({nonempty_good} nonempty good)")
    elapsed = time.perf_counter() - t0
    for row in table:
        print("   ", row)
    ok = outside == 0 and disagree == 0 and nonempty_good_total > 0 and elapsed < 900
    acceptance(
        9,
        "bad b on listed hyperplanes, reduce_and_solve matches the integer hull",
        ok,
        f"{outside} uncovered, {disagree} disagreements, {nonempty_good_total} reductions, {elapsed:.1f}s; "
        + "; ".join(table),
    )
    assert ok


# -- 10 ------------------------------------------------------------------------


def test_criterion_10_nondegenerate_rows(acceptance):
    rng = random.Random(10)
    accepted = counterexamples = 0
    per_m = {}
    while accepted < 500:
        m = rng.randint(2, 7)
        A = IntMatrix([[rng.randint(-2, 2) for _ in range(2)] for _ in range(m)])
        if not is_nondegenerate(A):
            continue
        accepted += 1
        per_m[m] = per_m.get(m, 0) + 1
        counterexamples += not nondeg_row_bound_check(A)
        counterexamples += m > 2 + delta(A) ** 2
    ok = counterexamples == 0
    acceptance(
        10,
        "non-degenerate A satisfy m <= n + delta^2",
        ok,
        f"{accepted} accepted, by m {dict(sorted(per_m.items()))}, {counterexamples} counterexamples",
    )
    assert ok


# -- 11 ------------------------------------------------------------------------


def test_criterion_11_integrality_number(acceptance):
    split = Instance(IntMatrix([[2, 0], [-2, 0], [0, 1], [0, -1]]), (1, 1, 1, 0))
    res = integrality_number_bruteforce(split)
    split_ok = res.k == 1 and res.W is not None and verify_integrality(split, res.W)
    rng = random.Random(11)
    integral_cases = [
        Instance(IntMatrix([[1, 0], [0, 1], [-1, 0], [0, -1]]), (1, 1, 0, 0)),
        Instance(IntMatrix([[1, 0], [0, 1], [-1, -1]]), (2, 3, 0)),
        Instance(IntMatrix([[1, 0, 0], [0, 1, 0], [0, 0, 1], [-1, -1, -1]]), (1, 1, 1, 0)),
    ]
    while len(integral_cases) < 8:
        A = IntMatrix([[rng.randint(-2, 2) for _ in range(2)] for _ in range(4)])
        try:
            inst = Instance(A, tuple(rng.randint(-4, 4) for _ in range(4)))
        except RankError:
            continue
        if recession_directions(A):
            continue
        vs = polyhedron_vertices(inst)
        if not vs.infeasible and all(x.denominator == 1 for v in vs for x in v):
            integral_cases.append(inst)
    zeros = [integrality_number_bruteforce(inst).k for inst in integral_cases]
    ok = split_ok and all(k == 0 for k in zeros)
    acceptance(
        11,
        "integrality number 1 on the split instance, 0 on integral polytopes",
        ok,
        f"split k={res.k} W={res.W.tolist() if res.W is not None else None}, integral cases {zeros}",
    )
    assert ok
