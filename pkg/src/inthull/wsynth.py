"""Integrality-constraint matrices built from covers.

A cover (B, T) of the columns of C yields a 0/1 matrix W with C = (B T) W.
Such a W is totally unimodular, and when every row of the constraint matrix
is either a unit row or lies in the row span of W, the vertices of
W-MIP(A, b) are integral for every b. :func:`synthesize` runs the whole
pipeline on an arbitrary full-column-rank A through its Hermite normal form.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .covering import (
    Cover,
    KChoice,
    _find_assignment,
    PointSet,
    box_cost_bound,
    choose_k,
    cover_box,
    cover_product,
    cover_trivial,
    verify_cover,
)
from .errors import (
    CapExceededError,
    CertificationError,
    CoverError,
    InternalConsistencyError,
    PreconditionError,
    RankError,
)
from .exactla import (
    HnfForm,
    IntMatrix,
    RatMatrix,
    _Matrix,
    as_matrix,
    delta as delta_of,
    det,
    hnf,
    independent_rows,
    inverse,
    parallelepiped_points,
    rank,
    solve,
)

EXHAUSTIVE_MAX_ROWS = 6
GH_MAX_SUBSETS = 2**20
TU_SUBMATRIX_CAP = 10**7


# ---------------------------------------------------------------------------
# W from a cover


@dataclass(frozen=True)
class WFactorization:
    W: IntMatrix
    BT: RatMatrix
    cover: Cover
    C: _Matrix

    @property
    def k(self) -> int:
        return self.W.rows


def build_w(C: _Matrix, cover: Cover) -> WFactorization:
    """0/1 matrix W with ``C == (B T) @ W``; one row per element of B and of T."""
    C = as_matrix(C)
    pts = PointSet.from_columns(C)
    if cover.dim != C.rows or not verify_cover(pts, cover):
        raise CoverError("cover does not cover the columns of C")
    nB, nT = len(cover.B), len(cover.T)
    grid = [[0] * C.cols for _ in range(nB + nT)]
    for j in range(C.cols):
        c = _point(C.col(j))
        a = cover.assignment.get(c) or _find_assignment(c, cover.B, cover.T)
        i, t = a
        grid[i][j] = 1
        if t is not None:
            grid[nB + t][j] = 1
    W = IntMatrix(grid, cols=C.cols)
    BT = RatMatrix(
        [[p[r] for p in cover.B.points + cover.T.points] for r in range(C.rows)],
        cols=nB + nT,
    )
    if (BT @ W).to_rat() != C.to_rat():
        raise InternalConsistencyError("(B T) W does not reproduce C")
    return WFactorization(W=W, BT=BT, cover=cover, C=C)


# ---------------------------------------------------------------------------
# total unimodularity


@dataclass(frozen=True)
class TuEvidence:
    """Outcome of a TU test; truthy iff the matrix is totally unimodular."""

    is_tu: bool
    method: str
    checked: int
    max_size: int
    counterexample: tuple | None = None

    def __bool__(self):
        return self.is_tu


def _reduced(W: IntMatrix) -> list[tuple[int, ...]]:
    """Rows of W without zero rows and without repeats up to sign.

    Neither change affects total unimodularity.
    """
    seen = set()
    out = []
    for r in W:
        if not any(r):
            continue
        key = r if next(x for x in r if x) > 0 else tuple(-x for x in r)
        if key not in seen:
            seen.add(key)
            out.append(key)
    return out


def _tu_exhaustive(W: IntMatrix, cap: int) -> TuEvidence:
    rows = _reduced(W)
    cols = _reduced(IntMatrix(rows, cols=W.cols).T) if rows else []
    # work on the column-reduced matrix, stored as its transpose rows
    M = IntMatrix(cols, cols=len(rows)).T if cols else None
    if M is None:
        return TuEvidence(True, "exhaustive", 0, 0)
    m, n = M.shape
    total = sum(math.comb(m, s) * math.comb(n, s) for s in range(1, min(m, n) + 1))
    if total > cap:
        raise CapExceededError(f"{total} square submatrices exceed cap {cap}")
    checked = 0
    for s in range(1, min(m, n) + 1):
        for rs in itertools.combinations(range(m), s):
            for cs in itertools.combinations(range(n), s):
                checked += 1
                d = det(M.submatrix(rs, cs))
                if d not in (-1, 0, 1):
                    return TuEvidence(False, "exhaustive", checked, s, (rs, cs, d))
    return TuEvidence(True, "exhaustive", checked, min(m, n))


def _signing(rows: Sequence[tuple[int, ...]]):
    """Signs making every column sum of ``rows`` lie in {-1, 0, 1}, or None."""
    n = len(rows[0])
    # remaining[i][j]: nonzeros in column j among rows i..end
    remaining = [[0] * n for _ in range(len(rows) + 1)]
    for i in range(len(rows) - 1, -1, -1):
        remaining[i] = [remaining[i + 1][j] + (rows[i][j] != 0) for j in range(n)]
    signs = []

    def rec(i, acc):
        if i == len(rows):
            return all(-1 <= a <= 1 for a in acc)
        for s in (1, -1):
            nxt = [a + s * x for a, x in zip(acc, rows[i])]
            if all(abs(a) <= 1 + rem for a, rem in zip(nxt, remaining[i + 1])):
                signs.append(s)
                if rec(i + 1, nxt):
                    return True
                signs.pop()
        return False

    return tuple(signs) if rec(0, [0] * n) else None


def _tu_ghouila_houri(W: IntMatrix, max_subsets: int) -> TuEvidence:
    if any(x not in (-1, 0, 1) for r in W for x in r):
        return TuEvidence(False, "ghouila_houri", 0, 1, ("entry",))
    rows = _reduced(W)
    if not rows:
        return TuEvidence(True, "ghouila_houri", 0, 0)
    cols = _reduced(IntMatrix(rows, cols=W.cols).T)
    # the criterion holds for W iff it holds for W^T; scan the shorter side
    vecs = rows if len(rows) <= len(cols) else cols
    d = len(vecs)
    if 2**d > max_subsets:
        raise CapExceededError(f"2^{d} row subsets exceed cap {max_subsets}")
    checked = 0
    for s in range(1, d + 1):
        for subset in itertools.combinations(range(d), s):
            checked += 1
            if _signing([vecs[i] for i in subset]) is None:
                return TuEvidence(False, "ghouila_houri", checked, s, subset)
    return TuEvidence(True, "ghouila_houri", checked, d)


def is_tu(W: _Matrix, method: str = "auto", cap: int | None = None) -> TuEvidence:
    """Decide total unimodularity of an integer matrix.

    ``exhaustive`` checks every square subdeterminant, ``ghouila_houri``
    checks that every subset of rows can be signed with column sums in
    {-1, 0, 1}. ``auto`` uses the former for at most six rows. Zero rows and
    rows repeated up to sign are dropped first, and Ghouila-Houri runs on
    whichever of W, W^T has fewer distinct vectors.
    """
    W = as_matrix(W)
    if not isinstance(W, IntMatrix):
        return TuEvidence(False, method, 0, 1, ("non-integer",))
    if method == "auto":
        method = "exhaustive" if W.rows <= EXHAUSTIVE_MAX_ROWS else "ghouila_houri"
    if method == "exhaustive":
        return _tu_exhaustive(W, TU_SUBMATRIX_CAP if cap is None else cap)
    if method == "ghouila_houri":
        return _tu_ghouila_houri(W, GH_MAX_SUBSETS if cap is None else cap)
    raise ValueError(f"unknown TU method {method!r}")


# ---------------------------------------------------------------------------
# certificate


@dataclass(frozen=True)
class Certificate:
    """Witness that W forces integral W-MIP vertices for every right-hand side.

    ``stacked_form`` classifies each row of A as ``("unit", sign, index)`` or
    ``("C", sign, index)``; ``dependency`` holds, for each row of C, the
    rational coefficients over the rows of W reproducing it.
    """

    W: IntMatrix
    C: _Matrix
    stacked_form: tuple
    dependency: tuple
    tu: TuEvidence

    @property
    def k(self) -> int:
        return self.W.rows


def certify(
    A: _Matrix,
    c_rows: Sequence[int],
    W: _Matrix,
    C: _Matrix | None = None,
    tu_method: str = "auto",
) -> Certificate:
    """Check that W certifies i(A, b) <= rows(W) for all b.

    Rows of A outside ``c_rows`` must be plus or minus unit rows, rows inside
    must be plus or minus a row of ``C`` (default: those rows themselves), W
    must be TU and every row of C must lie in the rational row span of W.
    Raises :class:`CertificationError` naming the failed condition.
    """
    A = as_matrix(A)
    W = as_matrix(W) if W.rows else W
    n = A.cols
    if W.cols != n:
        raise PreconditionError(f"W has {W.cols} columns, A has {n}")
    if rank(A) != n:
        raise RankError("certify needs rank(A) = n")
    c_rows = sorted(set(c_rows))
    if C is None:
        C = A.submatrix(c_rows)
    C = as_matrix(C) if C.rows else C
    crow_index = {}
    for idx in range(C.rows):
        crow_index.setdefault(tuple(Fraction(x) for x in C.row(idx)), idx)
    classes = []
    for i in range(A.rows):
        r = tuple(Fraction(x) for x in A.row(i))
        if i in c_rows:
            if r in crow_index:
                classes.append(("C", 1, crow_index[r]))
            elif tuple(-x for x in r) in crow_index:
                classes.append(("C", -1, crow_index[tuple(-x for x in r)]))
            else:
                raise CertificationError("stacked_form", f"row {i} of A is not +-C row")
        else:
            nz = [j for j, x in enumerate(r) if x != 0]
            if len(nz) != 1 or abs(r[nz[0]]) != 1:
                raise CertificationError("stacked_form", f"row {i} of A is not a +-unit row")
            classes.append(("unit", int(r[nz[0]]), nz[0]))
    tu = is_tu(W, tu_method) if W.rows else TuEvidence(True, "exhaustive", 0, 0)
    if not tu:
        raise CertificationError("not_tu", f"W is not totally unimodular ({tu.counterexample})")
    deps = []
    for idx in range(C.rows):
        row = C.row(idx)
        if W.rows == 0:
            if any(row):
                raise CertificationError("span", f"C row {idx} is nonzero but W is empty")
            deps.append(())
            continue
        x = solve(W.T, RatMatrix([[v] for v in row], cols=1))
        if x is None:
            raise CertificationError("span", f"C row {idx} is not in the row span of W")
        coeffs = tuple(x[i, 0] for i in range(W.rows))
        recon = tuple(sum(c * W[i, j] for i, c in enumerate(coeffs)) for j in range(n))
        if recon != tuple(Fraction(v) for v in row):
            raise InternalConsistencyError("span witness does not reproduce its row")
        deps.append(coeffs)
    return Certificate(W=W, C=C, stacked_form=tuple(classes), dependency=tuple(deps), tu=tu)


def _non_unit_rows(M: _Matrix) -> list[int]:
    out = []
    for i in range(M.rows):
        nz = [x for x in M.row(i) if x != 0]
        if not (len(nz) == 1 and abs(nz[0]) == 1):
            out.append(i)
    return out


def certify_w(A: _Matrix, W: _Matrix, tu_method: str = "auto") -> tuple[Certificate, str]:
    """Certify W for A in original or Hermite coordinates.

    The certificate is coordinate dependent: a unimodular change of variables
    x = U x' maps the condition for (A U, W U) to one for (A, W). Original
    coordinates are tried first. Returns the certificate and ``"original"`` or
    ``"hermite"``; raises the Hermite-coordinate failure when both fail.
    """
    A = A if isinstance(A, IntMatrix) else IntMatrix(A)
    try:
        return certify(A, _non_unit_rows(A), W, tu_method=tu_method), "original"
    except CertificationError:
        pass
    h = hnf(A)
    W_h = W @ h.U if W.rows else W
    return certify(h.H, _non_unit_rows(h.H), W_h, tu_method=tu_method), "hermite"


def compact_rows(W: IntMatrix) -> IntMatrix:
    """W without zero rows and repeated rows; the integrality condition is unchanged."""
    seen = {}
    for i in range(W.rows):
        r = W.row(i)
        if any(r):
            seen.setdefault(r, None)
    return IntMatrix(list(seen), cols=W.cols)


# ---------------------------------------------------------------------------
# distinct-column bound


def c_bound(r: int, Delta: int) -> int:
    """Upper bound on the number of distinct columns of a rank-r matrix.

    r^2 + r + 1 when Delta = 1, otherwise the ceiling of
    Delta^(2 + log2 log2 Delta) * r^2 + 1; 1 when r = 0.
    """
    if r < 0 or Delta < 1:
        raise ValueError("c_bound needs r >= 0 and Delta >= 1")
    if r == 0:
        return 1
    if Delta == 1:
        return r * r + r + 1
    p = Delta.bit_length() - 1
    if Delta == 1 << p:
        # Delta^(log2 log2 Delta) = (log2 Delta)^(log2 Delta)
        return Delta * Delta * p**p * r * r + 1
    lg = math.log2(Delta)
    val = Delta**2 * lg**lg * r * r + 1
    nearest = round(val)
    return nearest if abs(val - nearest) <= 1e-9 * val else math.ceil(val)


def w_row_bound(delta: int, r: int, Delta_A2: int | None, Delta_A: int) -> float:
    """[4 sqrt(delta) + log2(delta)] * min(c(r, Delta(A2)), c(r, Delta(A)))."""
    cs = [c_bound(r, Delta_A)]
    if Delta_A2 is not None:
        cs.append(c_bound(r, Delta_A2))
    return box_cost_bound(delta) * min(cs)


# ---------------------------------------------------------------------------
# group reduction


@dataclass(frozen=True)
class GroupReduction:
    """Integral row transformation E with E Y integral.

    ``Pi`` is the group {g in [0,1)^n : g^T A1 integral}; ``G`` and ``V``
    split ``Y^T`` into fractional and integral parts; ``chain_orders`` are
    the orders of the nested subgroups generated by G's columns.
    """

    Pi: tuple[tuple[Fraction, ...], ...]
    G: RatMatrix
    V: IntMatrix
    E: IntMatrix
    chain_orders: tuple[int, ...]
    chain_alphas: tuple[int, ...]
    chain_betas: tuple[tuple[int, ...], ...]


def _mod1(v):
    return tuple(x - math.floor(x) for x in v)


def group_reduce(A1: IntMatrix, Y: _Matrix) -> GroupReduction:
    A1 = as_matrix(A1)
    Y = as_matrix(Y)
    n = A1.rows
    d = det(A1)
    if d == 0:
        raise PreconditionError("A1 must be invertible")
    if Y.cols != n:
        raise PreconditionError("Y must have as many columns as A1")
    r = Y.rows
    if not (Y @ A1).is_integral():
        raise PreconditionError("Y A1 is not integral")
    if rank(Y) != r:
        raise PreconditionError("Y must have full row rank")
    delta = abs(d)

    A1T = A1.T
    A1T_inv = inverse(A1T)
    Pi = tuple(
        sorted(tuple(sum(A1T_inv[i, j] * p[j] for j in range(n)) for i in range(n))
               for p in parallelepiped_points(A1T))
    )
    Pi_set = set(Pi)

    rows = [tuple(Fraction(x) for x in Y.row(i)) for i in range(r)]
    Gcols = [_mod1(y) for y in rows]
    Vcols = [tuple(int(a - g) for a, g in zip(y, gc)) for y, gc in zip(rows, Gcols)]
    for g in Gcols:
        if g not in Pi_set:
            raise InternalConsistencyError("fractional part of a row of Y is not in Pi")

    zero = (Fraction(0),) * n
    subgroup = {zero: ()}  # element -> integer coefficients over G_1..G_{i-1}
    orders, alphas, betas = [], [], []
    E = [[0] * r for _ in range(r)]
    for i, g in enumerate(Gcols):
        s, h = 1, g
        while h not in subgroup:
            s += 1
            h = _mod1(tuple(a + b for a, b in zip(h, g)))
            if s > delta:
                raise InternalConsistencyError("subgroup closure exceeded delta elements")
        alpha = s
        beta = subgroup[h]
        alphas.append(alpha)
        betas.append(tuple(beta))
        for j, bj in enumerate(beta):
            E[i][j] = -bj
        E[i][i] = alpha
        grown = {}
        for elem, coef in subgroup.items():
            cur = elem
            for t in range(alpha):
                grown[cur] = coef + (t,)
                cur = _mod1(tuple(a + b for a, b in zip(cur, g)))
        subgroup = grown
        orders.append(len(subgroup))
        if len(subgroup) > delta:
            raise InternalConsistencyError("subgroup larger than Pi")
    Emat = IntMatrix(E, cols=r)
    G = RatMatrix([[Gcols[j][i] for j in range(r)] for i in range(n)], cols=r)
    V = IntMatrix([[Vcols[j][i] for j in range(r)] for i in range(n)], cols=r)
    red = GroupReduction(
        Pi=Pi,
        G=G,
        V=V,
        E=Emat,
        chain_orders=tuple(orders),
        chain_alphas=tuple(alphas),
        chain_betas=tuple(betas),
    )
    if r:
        if (G + V).T.to_rat() != Y.to_rat():
            raise InternalConsistencyError("Y != (G + V)^T")
        if not (Emat @ Y).is_integral():
            raise InternalConsistencyError("E Y is not integral")
        if abs(det(Emat)) != math.prod(alphas) or math.prod(alphas) > delta:
            raise InternalConsistencyError("|det E| is not the subgroup order")
    return red


# ---------------------------------------------------------------------------
# the full pipeline


@dataclass(frozen=True)
class BoundReport:
    part: str
    k: int
    n: int
    m: int
    ell: int
    r: int
    delta: int
    alphas: tuple[int, ...]
    Delta_A: int
    Delta_A2: int | None
    c_A: int
    c_A2: int | None
    box_bound: float
    bound: float
    box_cost: int
    distinct_columns: int
    chain_orders: tuple[int, ...] = ()

    def as_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass(frozen=True)
class Synthesis:
    """Result of :func:`synthesize`.

    ``W`` acts on the original variables; ``certificate`` and
    ``factorization`` live in the Hermite coordinates ``hnf.H``, where the
    certified matrix is ``W @ hnf.U``.
    """

    W: IntMatrix
    certificate: Certificate
    report: BoundReport
    hnf: HnfForm
    factorization: WFactorization | None
    group: GroupReduction | None = None
    k_choice: KChoice | None = None


def _point(col) -> tuple:
    return PointSet(len(col), (tuple(col),)).points[0]


def _run_part(A: IntMatrix, h: HnfForm, part: str, Delta_A: int) -> Synthesis:
    n, ell = h.n, h.ell
    m = A.rows
    H = h.H
    a1_i = h.a1_i
    a2 = h.a2
    r = rank(a2) if a2.rows else 0
    a2_bar = a2.submatrix(independent_rows(a2)) if r else IntMatrix([], cols=n)
    Delta_A2 = delta_of(a2) if r else None
    c_A = c_bound(r, Delta_A)
    c_A2 = c_bound(r, Delta_A2) if r else None
    bound = w_row_bound(h.delta, r, Delta_A2, Delta_A)

    if ell:
        kc = choose_k(h.alphas)
        cover_i = cover_box(h.lam, kc, points=[_point(c) for c in a1_i.columns()])
    else:
        kc = None
        cover_i = cover_trivial(PointSet(0, ((),)))

    group = None
    if part == "part1" or r == 0:
        lower = a2_bar
    else:
        Y = a2_bar @ inverse(h.top)
        group = group_reduce(h.top, Y)
        lower = RatMatrix(
            [[Y[i, j] if j < n - ell else 0 for j in range(n)] for i in range(r)], cols=n
        )
    lower_pts = [_point(c) for c in lower.columns()] if r else [() for _ in range(n)]
    cover_2 = cover_trivial(PointSet(r, tuple(lower_pts)))
    stacked = [_point(a1_i.col(j)) + lower_pts[j] for j in range(n)]
    cover = cover_product(cover_i, cover_2, points=stacked)

    c_rows = list(range(n - ell, m))
    if ell + r == 0:
        W_h = IntMatrix([], cols=n)
        fact = None
    else:
        Cmat = a1_i.vstack(lower) if ell else lower
        fact = build_w(Cmat, cover)
        W_h = fact.W
    cert = certify(H, c_rows, W_h)
    W = (W_h @ inverse(h.U)).to_int() if W_h.rows else W_h
    k = W.rows
    report = BoundReport(
        part=part,
        k=k,
        n=n,
        m=m,
        ell=ell,
        r=r,
        delta=h.delta,
        alphas=h.alphas,
        Delta_A=Delta_A,
        Delta_A2=Delta_A2,
        c_A=c_A,
        c_A2=c_A2,
        box_bound=box_cost_bound(h.delta),
        bound=bound,
        box_cost=cover_i.cost,
        distinct_columns=len(cover_2.B),
        chain_orders=group.chain_orders if group else (),
    )
    if k > bound * (1 + 1e-9):
        raise InternalConsistencyError(f"k = {k} exceeds the bound {bound}")
    return Synthesis(
        W=W, certificate=cert, report=report, hnf=h, factorization=fact, group=group, k_choice=kc
    )


def synthesize(A: _Matrix, mode: str = "best") -> Synthesis:
    """Build and certify a W with i(A, b) <= rows(W) for every b.

    ``part1`` covers a full-row-rank part of the rows below the square block
    directly; ``part2`` first rewrites them against the square block; ``best``
    runs both and keeps the smaller W (part1 on ties).
    """
    A = A if isinstance(A, IntMatrix) else IntMatrix(A)
    if rank(A) != A.cols:
        raise RankError("synthesize needs rank(A) = n")
    if mode not in ("part1", "part2", "best"):
        raise ValueError(f"unknown mode {mode!r}")
    h = hnf(A)
    Delta_A = delta_of(A)
    if mode != "best":
        return _run_part(A, h, mode, Delta_A)
    s1 = _run_part(A, h, "part1", Delta_A)
    s2 = _run_part(A, h, "part2", Delta_A)
    return s2 if s2.report.k < s1.report.k else s1
