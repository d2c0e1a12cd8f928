import itertools
import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from inthull.errors import DimensionError, RankError, SingularMatrixError
from inthull.exactla import (
    IntMatrix,
    RatMatrix,
    adjugate,
    as_matrix,
    decompose,
    delta,
    det,
    distinct_columns,
    hnf,
    independent_rows,
    inverse,
    parallelepiped_points,
    rank,
    row_lattice_basis,
    solve,
    column_vector,
)

EXAMPLE = IntMatrix([[1, 0, 0], [0, 1, 0], [2, 4, 5], [1, 4, 4], [2, 2, 3]])


def sym(M):
    return sympy.Matrix(M.tolist())


def int_matrices(max_rows=5, max_cols=4, lo=-4, hi=4):
    return st.integers(1, max_cols).flatmap(
        lambda n: st.integers(1, max_rows).flatmap(
            lambda m: st.lists(
                st.lists(st.integers(lo, hi), min_size=n, max_size=n), min_size=m, max_size=m
            )
        )
    ).map(IntMatrix)


def square_matrices(max_n=4, lo=-5, hi=5):
    return st.integers(1, max_n).flatmap(
        lambda n: st.lists(st.lists(st.integers(lo, hi), min_size=n, max_size=n), min_size=n, max_size=n)
    ).map(IntMatrix)


# -- construction ------------------------------------------------------------


def test_as_matrix_picks_integer_type():
    assert isinstance(as_matrix([[1, 2]]), IntMatrix)
    assert isinstance(as_matrix([[Fraction(1, 2), 2]]), RatMatrix)
    assert isinstance(as_matrix([[Fraction(4, 2)]]), IntMatrix)


def test_ragged_rows_rejected():
    with pytest.raises(DimensionError):
        IntMatrix([[1, 2], [3]])


def test_empty_matrix_needs_cols():
    with pytest.raises(DimensionError):
        IntMatrix([])
    E = IntMatrix([], cols=3)
    assert E.shape == (0, 3)
    assert (E @ IntMatrix.identity(3)).shape == (0, 3)


def test_intmatrix_rejects_fractions():
    with pytest.raises((TypeError, ValueError)):
        IntMatrix([[Fraction(1, 2)]])


def test_arithmetic_and_transpose():
    A = IntMatrix([[1, 2], [3, 4]])
    assert (A @ A).tolist() == [[7, 10], [15, 22]]
    assert A.T.tolist() == [[1, 3], [2, 4]]
    assert (A + A).tolist() == [[2, 4], [6, 8]]
    assert (A - A) == IntMatrix.zeros(2, 2)
    assert A.submatrix([1], [0]).tolist() == [[3]]
    assert A.vstack(A).shape == (4, 2)
    assert A.hstack(A).shape == (2, 4)


# -- determinants and rank ---------------------------------------------------


@settings(max_examples=150, deadline=None)
@given(square_matrices())
def test_det_matches_sympy(M):
    assert det(M) == sym(M).det()


@settings(max_examples=100, deadline=None)
@given(int_matrices())
def test_rank_matches_sympy(M):
    assert rank(M) == sym(M).rank()


def test_det_of_rational_matrix():
    M = RatMatrix([[Fraction(1, 2), 1], [0, Fraction(2, 3)]])
    assert det(M) == Fraction(1, 3)


def test_bareiss_big_entries_exact():
    M = IntMatrix([[10**30 + 1, 7], [3, 10**30 - 1]])
    assert det(M) == (10**30 + 1) * (10**30 - 1) - 21


@settings(max_examples=80, deadline=None)
@given(square_matrices(max_n=4))
def test_adjugate_identity(M):
    d = det(M)
    assert adjugate(M) @ M == IntMatrix([[d if i == j else 0 for j in range(M.rows)] for i in range(M.rows)])


@settings(max_examples=80, deadline=None)
@given(square_matrices(max_n=4))
def test_inverse_matches_sympy(M):
    if det(M) == 0:
        with pytest.raises(SingularMatrixError):
            inverse(M)
    else:
        assert inverse(M).tolist() == sym(M).inv().tolist()


def test_solve_inconsistent_returns_none():
    M = IntMatrix([[1, 1], [2, 2]])
    assert solve(M, column_vector([1, 3])) is None
    x = solve(M, column_vector([1, 2]))
    assert M @ x == column_vector([1, 2])


def test_independent_rows_greedy():
    M = IntMatrix([[1, 1], [2, 2], [0, 1], [5, 7]])
    assert independent_rows(M) == [0, 2]


# -- delta -------------------------------------------------------------------


def test_delta_worked_example():
    assert delta(EXAMPLE) == 5
    assert delta(EXAMPLE.submatrix([3, 4])) == 6


def test_delta_modes():
    A = IntMatrix([[7, 0], [0, 1], [0, 1]])
    assert delta(A, mode="full_rank") == 7
    assert delta(A, mode="max") == 7
    B = IntMatrix([[1, 1], [1, -1]])
    assert delta(B) == 2
    assert delta(B, mode="max") == 2
    C = IntMatrix([[3, 1], [6, 2]])
    assert delta(C) == 6  # rank one: the largest entry
    assert delta(C, mode="max") == 6


def test_delta_rank_zero_raises():
    with pytest.raises(RankError):
        delta(IntMatrix([[0, 0]]))


def brute_delta(M):
    r = sym(M).rank()
    best = 0
    for rs in itertools.combinations(range(M.rows), r):
        for cs in itertools.combinations(range(M.cols), r):
            best = max(best, abs(sym(M).extract(list(rs), list(cs)).det()))
    return best


@settings(max_examples=60, deadline=None)
@given(int_matrices(max_rows=5, max_cols=3, lo=-3, hi=3))
def test_delta_matches_bruteforce(M):
    if rank(M) == 0:
        return
    assert delta(M) == brute_delta(M)


# -- Hermite normal form -----------------------------------------------------


def test_hnf_worked_example():
    h = hnf(EXAMPLE)
    h.check(EXAMPLE)
    assert h.ell == 1
    assert h.alphas == (5,)
    assert h.delta == 5
    assert h.a2.rows == 2


def test_hnf_identity_has_no_lambda():
    h = hnf(IntMatrix.identity(3))
    assert h.ell == 0 and h.delta == 1


def test_hnf_rejects_rank_deficient():
    with pytest.raises(RankError):
        hnf(IntMatrix([[1, 1], [2, 2]]))


@settings(max_examples=120, deadline=None)
@given(int_matrices(max_rows=6, max_cols=4))
def test_hnf_invariants(A):
    if rank(A) < A.cols:
        return
    h = hnf(A)
    h.check(A)
    top_rows = [h.row_permutation[i] for i in range(A.cols)]
    assert h.delta == abs(sym(A.submatrix(top_rows)).det())


# -- lattices ----------------------------------------------------------------


def lattice_contains(basis_rows, v):
    # v in the Z-span of the rows: solve over Q and check integrality
    M = sympy.Matrix(basis_rows).T
    sol, params = M.gauss_jordan_solve(sympy.Matrix(v))
    sol = sol.subs({p: 0 for p in params})
    return all(x.is_integer for x in sol)


@settings(max_examples=60, deadline=None)
@given(int_matrices(max_rows=4, max_cols=3, lo=-4, hi=4))
def test_row_lattice_basis_spans_same_lattice(W):
    L = row_lattice_basis(W)
    assert L.rows == rank(W)
    if L.rows == 0:
        return
    for i in range(W.rows):
        assert lattice_contains(L.tolist(), list(W.row(i)))
    for i in range(L.rows):
        # each basis row is an integer combination of W's rows
        M = sympy.Matrix(W.tolist()).T
        aug = M.row_join(sympy.Matrix(list(L.row(i))))
        assert aug.rank() == M.rank()


def parallelepiped_bruteforce(B):
    n = B.rows
    Binv = sym(B).inv()
    corners = [sym(B) * sympy.Matrix(c) for c in itertools.product([0, 1], repeat=n)]
    lo = [min(c[i] for c in corners) for i in range(n)]
    hi = [max(c[i] for c in corners) for i in range(n)]
    out = []
    for v in itertools.product(*(range(lo[i], hi[i] + 1) for i in range(n))):
        lam = Binv * sympy.Matrix(v)
        if all(0 <= x < 1 for x in lam):
            out.append(tuple(v))
    return sorted(out)


@settings(max_examples=40, deadline=None)
@given(square_matrices(max_n=3, lo=-4, hi=4))
def test_parallelepiped_matches_bruteforce(B):
    if det(B) == 0:
        with pytest.raises(SingularMatrixError):
            parallelepiped_points(B)
        return
    pts = parallelepiped_points(B)
    assert len(pts) == abs(det(B))
    assert pts == parallelepiped_bruteforce(B)


def test_decompose_roundtrip():
    rng = random.Random(3)
    B = IntMatrix([[2, 1], [0, 3]])
    pts = set(parallelepiped_points(B))
    for _ in range(50):
        v = (rng.randint(-20, 20), rng.randint(-20, 20))
        lam, tau = decompose(B, v)
        assert all(0 <= x < 1 for x in lam)
        rebuilt = tuple(sum(B[i, j] * (lam[j] + tau[j]) for j in range(2)) for i in range(2))
        assert rebuilt == v
        assert tuple(sum(B[i, j] * lam[j] for j in range(2)) for i in range(2)) in pts


def test_distinct_columns():
    M = IntMatrix([[1, 2, 1, 2, 3], [0, 0, 0, 1, 0]])
    assert distinct_columns(M) == (4, [0, 1, 3, 4])
