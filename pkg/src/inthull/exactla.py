"""Exact dense linear algebra over the integers and the rationals.

Matrices are immutable row-major grids of Python ints (:class:`IntMatrix`) or
:class:`fractions.Fraction` (:class:`RatMatrix`). Nothing in this module ever
touches floating point.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import (
    CapExceededError,
    DimensionError,
    InternalConsistencyError,
    RankError,
    SingularMatrixError,
)

DEFAULT_SUBMATRIX_CAP = 10**7


def _as_int(x):
    if isinstance(x, bool):
        raise TypeError("booleans are not matrix entries")
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    raise TypeError(f"non-integer entry {x!r}")


def _as_frac(x):
    if isinstance(x, bool):
        raise TypeError("booleans are not matrix entries")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"non-rational entry {x!r}")


class _Matrix:
    __slots__ = ("_data", "rows", "cols")
    _coerce = staticmethod(_as_frac)

    def __init__(self, data: Iterable[Iterable], cols: int | None = None):
        grid = tuple(tuple(self._coerce(x) for x in row) for row in data)
        if grid:
            width = len(grid[0])
            for i, row in enumerate(grid):
                if len(row) != width:
                    raise DimensionError(
                        f"ragged matrix: row {i} has {len(row)} entries, expected {width}"
                    )
            if cols is not None and cols != width:
                raise DimensionError(f"declared {cols} columns, rows have {width}")
        else:
            if cols is None:
                raise DimensionError("an empty matrix needs an explicit column count")
            width = cols
        self._data = grid
        self.rows = len(grid)
        self.cols = width

    @classmethod
    def _wrap(cls, grid, cols):
        # trusted constructor: entries already have the right type
        m = object.__new__(cls)
        m._data = grid
        m.rows = len(grid)
        m.cols = cols
        return m

    @classmethod
    def identity(cls, n: int):
        one = cls._coerce(1)
        zero = cls._coerce(0)
        return cls._wrap(
            tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n)), n
        )

    @classmethod
    def zeros(cls, rows: int, cols: int):
        zero = cls._coerce(0)
        return cls._wrap(tuple((zero,) * cols for _ in range(rows)), cols)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, idx):
        i, j = idx
        return self._data[i][j]

    def row(self, i: int) -> tuple:
        return self._data[i]

    def col(self, j: int) -> tuple:
        return tuple(r[j] for r in self._data)

    def columns(self) -> list[tuple]:
        return [self.col(j) for j in range(self.cols)]

    def tolist(self) -> list[list]:
        return [list(r) for r in self._data]

    def __iter__(self):
        return iter(self._data)

    @property
    def T(self):
        return type(self)._wrap(
            tuple(tuple(r[j] for r in self._data) for j in range(self.cols)), self.rows
        )

    def submatrix(self, rows: Sequence[int] | None = None, cols: Sequence[int] | None = None):
        rows = range(self.rows) if rows is None else rows
        if cols is None:
            return type(self)._wrap(tuple(self._data[i] for i in rows), self.cols)
        return type(self)._wrap(
            tuple(tuple(self._data[i][j] for j in cols) for i in rows), len(cols)
        )

    def vstack(self, other: "_Matrix"):
        if self.cols != other.cols:
            raise DimensionError(f"vstack of {self.shape} and {other.shape}")
        cls = IntMatrix if isinstance(self, IntMatrix) and isinstance(other, IntMatrix) else RatMatrix
        return cls(self._data + other._data, cols=self.cols)

    def hstack(self, other: "_Matrix"):
        if self.rows != other.rows:
            raise DimensionError(f"hstack of {self.shape} and {other.shape}")
        cls = IntMatrix if isinstance(self, IntMatrix) and isinstance(other, IntMatrix) else RatMatrix
        return cls(
            (a + b for a, b in zip(self._data, other._data)), cols=self.cols + other.cols
        )

    def __matmul__(self, other: "_Matrix"):
        if not isinstance(other, _Matrix):
            return NotImplemented
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        cls = IntMatrix if isinstance(self, IntMatrix) and isinstance(other, IntMatrix) else RatMatrix
        ocols = other.T._data
        zero = cls._coerce(0)
        grid = tuple(
            tuple(sum((a * b for a, b in zip(r, c)), zero) for c in ocols) for r in self._data
        )
        if cls is RatMatrix:
            grid = tuple(tuple(Fraction(x) for x in r) for r in grid)
        return cls._wrap(grid, other.cols)

    def _elementwise(self, other, op):
        if self.shape != other.shape:
            raise DimensionError(f"shape mismatch {self.shape} vs {other.shape}")
        cls = IntMatrix if isinstance(self, IntMatrix) and isinstance(other, IntMatrix) else RatMatrix
        return cls(
            (tuple(op(a, b) for a, b in zip(r, s)) for r, s in zip(self._data, other._data)),
            cols=self.cols,
        )

    def __add__(self, other):
        return self._elementwise(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._elementwise(other, lambda a, b: a - b)

    def __neg__(self):
        return type(self)._wrap(tuple(tuple(-x for x in r) for r in self._data), self.cols)

    def scale(self, c):
        cls = IntMatrix if isinstance(self, IntMatrix) and isinstance(c, int) else RatMatrix
        return cls((tuple(c * x for x in r) for r in self._data), cols=self.cols)

    def __eq__(self, other):
        if not isinstance(other, _Matrix):
            return NotImplemented
        return self.shape == other.shape and self._data == other._data

    def __hash__(self):
        return hash((self.rows, self.cols, self._data))

    def __repr__(self):
        return f"{type(self).__name__}({self.tolist()!r})"

    def is_integral(self) -> bool:
        return all(Fraction(x).denominator == 1 for r in self._data for x in r)

    def to_int(self) -> "IntMatrix":
        return IntMatrix(self._data, cols=self.cols)

    def to_rat(self) -> "RatMatrix":
        return RatMatrix(self._data, cols=self.cols)


class IntMatrix(_Matrix):
    """Arbitrary-precision integer matrix."""

    __slots__ = ()
    _coerce = staticmethod(_as_int)


class RatMatrix(_Matrix):
    """Exact rational matrix; entries are reduced Fractions."""

    __slots__ = ()
    _coerce = staticmethod(_as_frac)


def as_matrix(data, cols: int | None = None) -> _Matrix:
    """Build an IntMatrix when every entry is integral, else a RatMatrix."""
    if isinstance(data, _Matrix):
        return data
    rows = [list(r) for r in data]
    try:
        return IntMatrix(rows, cols=cols)
    except TypeError:
        return RatMatrix(rows, cols=cols)


def column_vector(values: Sequence) -> _Matrix:
    return as_matrix([[v] for v in values], cols=1)


# ---------------------------------------------------------------------------
# determinants and rank


def _bareiss_det(grid: list[list[int]]) -> int:
    n = len(grid)
    if n == 0:
        return 1
    m = [list(r) for r in grid]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = m[k][k]
        rk = m[k]
        for i in range(k + 1, n):
            ri = m[i]
            a = ri[k]
            for j in range(k + 1, n):
                ri[j] = (ri[j] * pivot - a * rk[j]) // prev
        prev = pivot
    return sign * m[n - 1][n - 1]


def _integer_rows(M: _Matrix) -> tuple[list[list[int]], int]:
    """Scale each row to integers; returns (grid, product of scale factors)."""
    scale = 1
    grid = []
    for r in M:
        if isinstance(M, IntMatrix):
            grid.append(list(r))
            continue
        d = math.lcm(*(x.denominator for x in r)) if r else 1
        scale *= d
        grid.append([int(x * d) for x in r])
    return grid, scale


def det(M: _Matrix):
    """Exact determinant by Bareiss fraction-free elimination.

    Rational input is row-scaled to integers first, so the result is an int
    for IntMatrix input and a Fraction for RatMatrix input.
    """
    if not M.is_square:
        raise DimensionError(f"determinant of non-square {M.shape} matrix")
    grid, scale = _integer_rows(M)
    d = _bareiss_det(grid)
    if isinstance(M, IntMatrix):
        return d
    return Fraction(d, scale)


def rref(M: _Matrix) -> tuple[RatMatrix, list[int]]:
    """Reduced row echelon form over Q and the list of pivot columns."""
    m = [[Fraction(x) for x in r] for r in M]
    pivots = []
    row = 0
    for c in range(M.cols):
        p = next((i for i in range(row, M.rows) if m[i][c] != 0), None)
        if p is None:
            continue
        m[row], m[p] = m[p], m[row]
        pv = m[row][c]
        m[row] = [x / pv for x in m[row]]
        for i in range(M.rows):
            if i != row and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[row])]
        pivots.append(c)
        row += 1
        if row == M.rows:
            break
    return RatMatrix(m, cols=M.cols), pivots


def rank(M: _Matrix) -> int:
    if M.rows == 0 or M.cols == 0:
        return 0
    return len(rref(M)[1])


def independent_rows(M: _Matrix) -> list[int]:
    """Greedy maximal set of linearly independent rows, scanned in row order."""
    chosen: list[int] = []
    basis: list[list[Fraction]] = []  # rows kept in echelon form with pivots
    pivcols: list[int] = []
    for i in range(M.rows):
        v = [Fraction(x) for x in M.row(i)]
        for b, pc in zip(basis, pivcols):
            if v[pc] != 0:
                f = v[pc] / b[pc]
                v = [a - f * c for a, c in zip(v, b)]
        pc = next((j for j, x in enumerate(v) if x != 0), None)
        if pc is not None:
            basis.append(v)
            pivcols.append(pc)
            chosen.append(i)
    return chosen


def _check_cap(count: int, cap: int, what: str):
    if count > cap:
        raise CapExceededError(f"{what}: {count} candidates exceed cap {cap}")


def delta(M: _Matrix, mode: str = "full_rank", cap: int = DEFAULT_SUBMATRIX_CAP):
    """Largest absolute minor of ``M``.

    ``mode="full_rank"`` maximises over rank(M) x rank(M) submatrices;
    ``mode="max"`` over square submatrices of every size. Submatrices are
    enumerated exhaustively, which is why ``cap`` bounds their number.
    """
    if mode not in ("full_rank", "max"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "full_rank":
        r = rank(M)
        if r == 0:
            raise RankError("delta(full_rank) of a rank-0 matrix is undefined")
        sizes = [r]
    else:
        sizes = range(1, min(M.rows, M.cols) + 1)
    _check_cap(
        sum(math.comb(M.rows, s) * math.comb(M.cols, s) for s in sizes), cap, "delta"
    )
    best = 0
    for s in sizes:
        for rs in itertools.combinations(range(M.rows), s):
            sub_rows = [M.row(i) for i in rs]
            for cs in itertools.combinations(range(M.cols), s):
                sub = type(M)._wrap(tuple(tuple(r[j] for j in cs) for r in sub_rows), s)
                d = abs(det(sub))
                if d > best:
                    best = d
    return best


# ---------------------------------------------------------------------------
# solving


def solve(M: _Matrix, rhs: _Matrix) -> RatMatrix | None:
    """Return some X with M X = rhs, or None when the system is inconsistent.

    Free variables are set to zero, so the solution is unique exactly when M
    has full column rank.
    """
    if M.rows != rhs.rows:
        raise DimensionError(f"solve: {M.shape} against rhs {rhs.shape}")
    aug = M.hstack(rhs) if M.cols else rhs
    red, pivots = rref(aug)
    n = M.cols
    if any(p >= n for p in pivots):
        return None
    x = [[Fraction(0)] * rhs.cols for _ in range(n)]
    for i, p in enumerate(pivots):
        x[p] = list(red.row(i)[n:])
    return RatMatrix(x, cols=rhs.cols)


def inverse(M: _Matrix) -> RatMatrix:
    if not M.is_square:
        raise DimensionError(f"inverse of non-square {M.shape} matrix")
    x = solve(M, RatMatrix.identity(M.rows))
    if x is None or rank(M) < M.rows:
        raise SingularMatrixError("matrix is singular")
    return x


def adjugate(M: IntMatrix) -> IntMatrix:
    """Integer adjugate: adj(M) M = det(M) I."""
    n = M.rows
    if not M.is_square:
        raise DimensionError(f"adjugate of non-square {M.shape} matrix")
    if n == 1:
        return IntMatrix([[1]])
    out = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [
                [M[r, c] for c in range(n) if c != i] for r in range(n) if r != j
            ]
            out[i][j] = (-1) ** (i + j) * _bareiss_det(minor)
    return IntMatrix(out)


# ---------------------------------------------------------------------------
# Hermite normal form


def _column_echelon(A: IntMatrix):
    """Lower-triangular column echelon form by unimodular column operations.

    Rows are scanned in order; a row becomes the pivot of the next column
    when it has a nonzero entry right of the previous pivots. Entries left of
    each pivot are reduced into [0, pivot). Returns (M, U, pivot_rows) with
    M = A U.
    """
    m, n = A.shape
    M = [list(r) for r in A]
    U = [[int(i == j) for j in range(n)] for i in range(n)]

    def colop(dst, src, q):
        # column dst -= q * column src
        for r in M:
            r[dst] -= q * r[src]
        for r in U:
            r[dst] -= q * r[src]

    def swap(a, b):
        for r in M:
            r[a], r[b] = r[b], r[a]
        for r in U:
            r[a], r[b] = r[b], r[a]

    def negate(a):
        for r in M:
            r[a] = -r[a]
        for r in U:
            r[a] = -r[a]

    pivot_rows: list[int] = []
    p = 0
    for i in range(m):
        if p == n:
            break
        row = M[i]
        if all(row[c] == 0 for c in range(p, n)):
            continue
        while True:
            nz = [c for c in range(p, n) if row[c] != 0]
            c_min = min(nz, key=lambda c: (abs(row[c]), c))
            if c_min != p:
                swap(p, c_min)
            if len(nz) == 1:
                break
            for c in range(p + 1, n):
                if row[c] != 0:
                    colop(c, p, row[c] // row[p])
        if row[p] < 0:
            negate(p)
        piv = row[p]
        for c in range(p):
            q = row[c] // piv
            if q:
                colop(c, p, q)
        pivot_rows.append(i)
        p += 1
    return M, U, pivot_rows


@dataclass(frozen=True)
class HnfForm:
    """Hermite normal form record ``H = A[row_permutation] @ U``.

    The top n x n block of H is ``[[I, 0], [*, Lambda]]`` with Lambda lower
    triangular, diagonal ``alphas`` (all >= 2) and every entry of its rows in
    ``[0, alpha_i)`` left of the diagonal.
    """

    U: IntMatrix
    H: IntMatrix
    row_permutation: tuple[int, ...]
    ell: int
    alphas: tuple[int, ...]
    delta: int

    @property
    def n(self) -> int:
        return self.H.cols

    @property
    def top(self) -> IntMatrix:
        """A^1, the top n x n block."""
        return self.H.submatrix(range(self.n))

    @property
    def a1_i(self) -> IntMatrix:
        """The last ell rows of the top block (all n columns)."""
        return self.H.submatrix(range(self.n - self.ell, self.n))

    @property
    def lam(self) -> IntMatrix:
        """The lower-triangular ell x ell block carrying the alphas."""
        rng = range(self.n - self.ell, self.n)
        return self.H.submatrix(rng, rng)

    @property
    def a2(self) -> IntMatrix:
        return self.H.submatrix(range(self.n, self.H.rows))

    def check(self, A: IntMatrix) -> None:
        """Assert every structural invariant against the source matrix."""
        n, ell = self.n, self.ell
        assert abs(det(self.U)) == 1
        assert A.submatrix(self.row_permutation) @ self.U == self.H
        assert sorted(self.row_permutation) == list(range(A.rows))
        assert len(self.alphas) == ell and all(a >= 2 for a in self.alphas)
        assert self.delta == math.prod(self.alphas) == abs(det(self.top))
        for i in range(n):
            r = self.H.row(i)
            if i < n - ell:
                assert r == tuple(int(i == j) for j in range(n))
                continue
            a = self.alphas[i - (n - ell)]
            assert r[i] == a
            assert all(x == 0 for x in r[i + 1 :])
            assert all(0 <= x < a for x in r[:i])


def hnf(A: IntMatrix) -> HnfForm:
    """Hermite normal form of a full-column-rank integer matrix.

    The first n linearly independent rows (in row order) become the top
    block; rows whose pivot is 1 are moved first so they form the identity
    block, and the columns are permuted to match.
    """
    A = A if isinstance(A, IntMatrix) else IntMatrix(A)
    m, n = A.shape
    M, U, pivot_rows = _column_echelon(A)
    if len(pivot_rows) < n:
        raise RankError(f"hnf needs full column rank {n}, got {len(pivot_rows)}")
    diag = [M[pivot_rows[p]][p] for p in range(n)]
    ones = [p for p in range(n) if diag[p] == 1]
    big = [p for p in range(n) if diag[p] != 1]
    col_order = ones + big
    pivot_set = set(pivot_rows)
    row_order = (
        [pivot_rows[p] for p in ones]
        + [pivot_rows[p] for p in big]
        + [i for i in range(m) if i not in pivot_set]
    )
    H = IntMatrix([[M[i][c] for c in col_order] for i in row_order], cols=n)
    Uo = IntMatrix([[r[c] for c in col_order] for r in U], cols=n)
    alphas = tuple(diag[p] for p in big)
    return HnfForm(
        U=Uo,
        H=H,
        row_permutation=tuple(row_order),
        ell=len(big),
        alphas=alphas,
        delta=math.prod(alphas),
    )


def row_lattice_basis(W: IntMatrix) -> IntMatrix:
    """Rows generating the same Z-lattice as the rows of ``W`` (rank many)."""
    if W.rows == 0:
        return W
    M, _, pivots = _column_echelon(W.T)
    r = len(pivots)
    return IntMatrix([[M[i][j] for i in range(W.cols)] for j in range(r)], cols=W.cols)


# ---------------------------------------------------------------------------
# fundamental parallelepiped


def parallelepiped_points(B: IntMatrix) -> list[tuple[int, ...]]:
    """Integer points ``B @ lam`` with ``lam`` in [0,1)^d, sorted lexicographically.

    Coset representatives of Z^d / B Z^d are read off a triangular basis of
    the same lattice (a box with side lengths equal to its diagonal), then
    folded into B's half-open cell. The output has exactly |det B| points.
    """
    if not B.is_square:
        raise DimensionError(f"parallelepiped of non-square {B.shape} matrix")
    d = det(B)
    if d == 0:
        raise SingularMatrixError("parallelepiped of a singular matrix")
    n = B.rows
    M, _, pivots = _column_echelon(B)
    diag = [M[pivots[p]][p] for p in range(n)]
    # M's row order equals B's (square, invertible), so M is lower triangular.
    adj = adjugate(B)
    ad = abs(d)
    sgn = 1 if d > 0 else -1
    out = set()
    for x in itertools.product(*(range(h) for h in diag)):
        # lam = adj x / d; keep numerators of frac(lam) over |d|
        num = [(sgn * sum(a * v for a, v in zip(adj.row(i), x))) % ad for i in range(n)]
        out.add(tuple(sum(B[i, j] * num[j] for j in range(n)) // ad for i in range(n)))
    pts = sorted(out)
    if len(pts) != ad:
        raise InternalConsistencyError("parallelepiped enumeration lost a coset")
    return pts


def decompose(B: _Matrix, v: Sequence[int]) -> tuple[tuple[Fraction, ...], tuple[int, ...]]:
    """Split ``v = B (lam + tau)`` with lam in [0,1)^d and tau integral."""
    x = solve(B, column_vector(v))
    if x is None or rank(B) < B.rows:
        raise SingularMatrixError("decompose needs an invertible basis")
    coords = [x[i, 0] for i in range(B.rows)]
    tau = tuple(math.floor(c) for c in coords)
    lam = tuple(c - t for c, t in zip(coords, tau))
    return lam, tau


# ---------------------------------------------------------------------------


def distinct_columns(M: _Matrix) -> tuple[int, list[int]]:
    """Number of pairwise distinct columns and the index of each first occurrence."""
    seen = {}
    for j in range(M.cols):
        seen.setdefault(M.col(j), j)
    reps = sorted(seen.values())
    return len(reps), reps
