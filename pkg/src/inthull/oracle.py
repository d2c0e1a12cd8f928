"""Desk-scale ground truth for integrality claims.

Everything here enumerates: bases for vertices, integer boxes for lattice
points, right-hand sides y of W x = y for mixed-integer fibres. Extremality of
a point in a finite set is decided by an exact phase-one simplex.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import BoundednessError, CapExceededError, DimensionError, RankError
from .exactla import IntMatrix, _Matrix, adjugate, as_matrix, det, rank, row_lattice_basis

DEFAULT_BASIS_CAP = 200_000
DEFAULT_POINT_CAP = 1_000_000
DEFAULT_Y_CAP = 200_000


@dataclass(frozen=True)
class Instance:
    """A polyhedron {x : A x <= b}, optionally clipped to an integer box.

    ``box`` is a sequence of (lo, hi) pairs, one per variable. When P is
    bounded the box must contain it; when P is unbounded the box is what
    makes enumeration possible and the oracle works on P intersected with it.
    """

    A: IntMatrix
    b: tuple[int, ...]
    box: tuple[tuple[int, int], ...] | None = None

    def __post_init__(self):
        A = self.A if isinstance(self.A, IntMatrix) else IntMatrix(self.A)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", tuple(int(v) for v in self.b))
        if len(self.b) != A.rows:
            raise DimensionError(f"b has {len(self.b)} entries, A has {A.rows} rows")
        if rank(A) != A.cols:
            raise RankError("instances need rank(A) = n")
        if self.box is not None:
            box = tuple((int(lo), int(hi)) for lo, hi in self.box)
            if len(box) != A.cols or any(lo > hi for lo, hi in box):
                raise DimensionError("box needs one (lo <= hi) pair per variable")
            object.__setattr__(self, "box", box)

    @property
    def n(self) -> int:
        return self.A.cols

    @property
    def m(self) -> int:
        return self.A.rows

    def system(self) -> tuple[list[tuple[int, ...]], list[int]]:
        """Constraint rows and right-hand sides, box rows appended."""
        rows = [self.A.row(i) for i in range(self.m)]
        rhs = list(self.b)
        if self.box is not None:
            n = self.n
            for i, (lo, hi) in enumerate(self.box):
                e = tuple(int(j == i) for j in range(n))
                rows.append(e)
                rhs.append(hi)
                rows.append(tuple(-x for x in e))
                rhs.append(-lo)
        return rows, rhs


@dataclass(frozen=True)
class VertexSet:
    """Exact points with a basis witness each.

    For vertices of P a witness is the tuple of tight row indices; for
    mixed-integer candidates it is ``(rows, y)`` with ``y`` the integral
    value of the lattice basis of W.
    """

    points: tuple[tuple[Fraction, ...], ...]
    witnesses: tuple = ()
    infeasible: bool = False

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)


def _frac_point(v) -> tuple[Fraction, ...]:
    return tuple(Fraction(x) for x in v)


def _is_integral(p) -> bool:
    return all(Fraction(x).denominator == 1 for x in p)


def _feasible(rows, rhs, x) -> bool:
    return all(sum(a * v for a, v in zip(r, x)) <= c for r, c in zip(rows, rhs))


# ---------------------------------------------------------------------------
# exact convex-hull membership


def in_convex_hull(p: Sequence, pts: Sequence[Sequence]) -> bool:
    """Exact test of ``p in conv(pts)`` by phase-one simplex with Bland's rule."""
    pts = list(pts)
    if not pts:
        return False
    d = len(p)
    N = len(pts)
    # rows: sum_s lam_s s_i = p_i (i < d), sum_s lam_s = 1
    rows = [[Fraction(s[i]) for s in pts] + [Fraction(p[i])] for i in range(d)]
    rows.append([Fraction(1)] * N + [Fraction(1)])
    for r in rows:
        if r[-1] < 0:
            for j in range(len(r)):
                r[j] = -r[j]
    m = len(rows)
    # append artificials
    tab = [r[:N] + [Fraction(int(i == k)) for k in range(m)] + [r[-1]] for i, r in enumerate(rows)]
    basis = [N + i for i in range(m)]
    ncols = N + m
    # objective: minimise sum of artificials -> reduced costs
    cost = [Fraction(0)] * N + [Fraction(1)] * m
    while True:
        # reduced cost c_j - c_B B^-1 A_j, tableau already holds B^-1 A
        red = []
        for j in range(ncols):
            z = sum(cost[basis[i]] * tab[i][j] for i in range(m))
            red.append(cost[j] - z)
        enter = next((j for j in range(ncols) if red[j] < 0), None)
        if enter is None:
            break
        best = None
        for i in range(m):
            a = tab[i][enter]
            if a > 0:
                ratio = tab[i][-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:  # cannot happen: phase one is bounded below by 0
            break
        i = best[1]
        pv = tab[i][enter]
        tab[i] = [x / pv for x in tab[i]]
        for k in range(m):
            if k != i and tab[k][enter] != 0:
                f = tab[k][enter]
                tab[k] = [a - f * b for a, b in zip(tab[k], tab[i])]
        basis[i] = enter
    infeas = sum(tab[i][-1] for i in range(m) if basis[i] >= N)
    return infeas == 0


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _planar_extremes(keys):
    """Monotone chain; points on an edge are dropped."""
    pts = sorted(keys)
    if len(pts) <= 2:
        return pts
    chains = []
    for seq in (pts, pts[::-1]):
        chain = []
        for p in seq:
            while len(chain) >= 2 and _cross(chain[-2], chain[-1], p) <= 0:
                chain.pop()
            chain.append(p)
        chains.extend(chain[:-1])
    return chains


def _support_extremes(keys, d):
    """Points that uniquely maximise some coordinate-style functional."""
    dirs = [tuple(int(i == k) * s for k in range(d)) for i in range(d) for s in (1, -1)]
    dirs += [tuple(s) for s in itertools.product((1, -1), repeat=d)]
    found = set()
    for c in dirs:
        vals = [sum(a * x for a, x in zip(c, p)) for p in keys]
        top = max(vals)
        hits = [p for p, v in zip(keys, vals) if v == top]
        if len(hits) == 1:
            found.add(hits[0])
    return found


def extreme_subset(points: Sequence[Sequence]) -> list[int]:
    """Indices of the points that are not convex combinations of the others."""
    uniq = {}
    for i, p in enumerate(points):
        uniq.setdefault(_frac_point(p), i)
    keys = list(uniq)
    if not keys:
        return []
    d = len(keys[0])
    if d <= 1 or len(keys) <= 2:
        ext = {min(keys), max(keys)}
    elif d == 2:
        ext = set(_planar_extremes(keys))
    else:
        known = _support_extremes(keys, d)
        ext = set(known)
        for idx, p in enumerate(keys):
            if p in known or in_convex_hull(p, list(known)):
                continue
            if not in_convex_hull(p, keys[:idx] + keys[idx + 1 :]):
                ext.add(p)
    return sorted(uniq[p] for p in ext)


# ---------------------------------------------------------------------------
# vertices of P


def _basis_solutions(rows, rhs, n, cap, fixed=()):
    """Yield (I, x) for every I with (rows_I; fixed rows) invertible.

    ``fixed`` is a list of (row, value) pairs appended to every system.
    """
    need = n - len(fixed)
    count = math.comb(len(rows), need)
    if count > cap:
        raise CapExceededError(f"{count} bases exceed cap {cap}")
    for I in itertools.combinations(range(len(rows)), need):
        M = IntMatrix([rows[i] for i in I] + [f[0] for f in fixed], cols=n)
        d = det(M)
        if d == 0:
            continue
        adj = adjugate(M)
        rhs_I = [rhs[i] for i in I] + [f[1] for f in fixed]
        x = tuple(Fraction(sum(a * v for a, v in zip(adj.row(k), rhs_I)), d) for k in range(n))
        yield I, x


def polyhedron_vertices(inst: Instance, cap: int = DEFAULT_BASIS_CAP) -> VertexSet:
    """All vertices of P (clipped to the box, if any), each with a tight basis.

    P is pointed because rank(A) = n, so an empty result means P is empty.
    """
    rows, rhs = inst.system()
    found = {}
    for I, x in _basis_solutions(rows, rhs, inst.n, cap):
        if x not in found and _feasible(rows, rhs, x):
            found[x] = I
    pts = tuple(sorted(found))
    return VertexSet(pts, tuple(found[p] for p in pts), infeasible=not pts)


def recession_directions(A: _Matrix) -> list[tuple[Fraction, ...]]:
    """Extreme rays of {x : A x <= 0}; empty iff every P(A, b) is bounded."""
    A = as_matrix(A)
    n = A.cols
    rays = set()
    rows = [A.row(i) for i in range(A.rows)]
    for I in itertools.combinations(range(len(rows)), n - 1):
        sub = [rows[i] for i in I]
        if sub and rank(IntMatrix(sub, cols=n)) != n - 1:
            continue
        # the cofactor vector spans the kernel of a rank n-1 row set
        d = []
        for j in range(n):
            minor = [[r[c] for c in range(n) if c != j] for r in sub]
            d.append((-1) ** j * (det(IntMatrix(minor, cols=n - 1)) if minor else 1))
        for s in (1, -1):
            v = tuple(s * x for x in d)
            if all(sum(a * x for a, x in zip(r, v)) <= 0 for r in rows):
                g = math.gcd(*v)
                rays.add(tuple(Fraction(x, g) for x in v))
    return sorted(rays)


def is_bounded(inst: Instance) -> bool:
    if inst.box is not None:
        return True
    return not recession_directions(inst.A)


def _require_bounded(inst: Instance):
    if not is_bounded(inst):
        raise BoundednessError("P(A, b) is unbounded and no box was given")


def validate_box(inst: Instance) -> None:
    """Raise when a box is given, P is bounded and some vertex lies outside."""
    if inst.box is None or recession_directions(inst.A):
        return
    plain = Instance(inst.A, inst.b)
    for v in polyhedron_vertices(plain):
        if any(not lo <= x <= hi for x, (lo, hi) in zip(v, inst.box)):
            raise DimensionError(f"box does not contain vertex {v}")


def _bounding_box(inst: Instance, verts: VertexSet):
    if inst.box is not None:
        return inst.box
    n = inst.n
    return tuple(
        (math.ceil(min(v[i] for v in verts)), math.floor(max(v[i] for v in verts)))
        for i in range(n)
    )


# ---------------------------------------------------------------------------
# integer hull


@dataclass(frozen=True)
class IntegerHull:
    points: tuple[tuple[int, ...], ...]
    vertices: tuple[tuple[int, ...], ...]

    @property
    def empty(self) -> bool:
        return not self.points


def integer_hull_points(
    inst: Instance, cap: int = DEFAULT_POINT_CAP, hull: bool = True
) -> IntegerHull:
    """Integer points of P and the ones extreme in their convex hull.

    ``hull=False`` skips the extremality tests and leaves ``vertices`` empty,
    which is all an emptiness query needs.
    """
    _require_bounded(inst)
    verts = polyhedron_vertices(inst)
    if verts.infeasible:
        return IntegerHull((), ())
    box = _bounding_box(inst, verts)
    size = math.prod(max(0, hi - lo + 1) for lo, hi in box)
    if size > cap:
        raise CapExceededError(f"{size} box points exceed cap {cap}")
    rows, rhs = inst.system()
    pts = tuple(
        x for x in itertools.product(*(range(lo, hi + 1) for lo, hi in box))
        if _feasible(rows, rhs, x)
    )
    if not hull:
        return IntegerHull(pts, ())
    ext = extreme_subset(pts)
    return IntegerHull(pts, tuple(pts[i] for i in ext))


# ---------------------------------------------------------------------------
# mixed-integer hulls


def _candidates(inst: Instance, W: _Matrix, basis_cap: int, y_cap: int):
    """Vertices of every nonempty fibre P n {W' x = y}, y integral.

    W' is a basis of the row lattice of W, so {x : W x integral} equals
    {x : W' x integral}.
    """
    _require_bounded(inst)
    n = inst.n
    rows, rhs = inst.system()
    W = as_matrix(W) if W.rows else W
    if W.cols != n:
        raise DimensionError(f"W has {W.cols} columns, expected {n}")
    if not isinstance(W, IntMatrix):
        raise DimensionError("W must be integral")
    Wb = row_lattice_basis(W) if W.rows else W
    k = Wb.rows
    verts = polyhedron_vertices(inst, basis_cap)
    if verts.infeasible:
        return {}
    if k == 0:
        return {v: (w, ()) for v, w in zip(verts.points, verts.witnesses)}
    wrows = [Wb.row(i) for i in range(k)]
    ranges = []
    for w in wrows:
        vals = [sum(a * x for a, x in zip(w, v)) for v in verts]
        ranges.append(range(math.ceil(min(vals)), math.floor(max(vals)) + 1))
    total = math.prod(len(r) for r in ranges)
    if total > y_cap:
        raise CapExceededError(f"{total} fibre values exceed cap {y_cap}")
    need = n - k
    count = math.comb(len(rows), need)
    if count > basis_cap:
        raise CapExceededError(f"{count} fibre bases exceed cap {basis_cap}")
    systems = []
    for J in itertools.combinations(range(len(rows)), need):
        M = IntMatrix([rows[i] for i in J] + wrows, cols=n)
        d = det(M)
        if d:
            systems.append((J, adjugate(M), d))
    found = {}
    for y in itertools.product(*ranges):
        for J, adj, d in systems:
            rhs_J = [rhs[i] for i in J] + list(y)
            x = tuple(
                Fraction(sum(a * v for a, v in zip(adj.row(r), rhs_J)), d) for r in range(n)
            )
            if x not in found and _feasible(rows, rhs, x):
                found[x] = (J, y)
    return found


def wmip_vertices(
    inst: Instance,
    W: _Matrix,
    basis_cap: int = DEFAULT_BASIS_CAP,
    y_cap: int = DEFAULT_Y_CAP,
) -> VertexSet:
    """Vertices of W-MIP(A, b) = conv{x in P : W x integral}.

    The mixed set is the union of the fibres P n {W x = y}; its hull is the
    hull of the fibre vertices, so the extreme fibre vertices are exactly the
    W-MIP vertices.
    """
    found = _candidates(inst, W, basis_cap, y_cap)
    if not found:
        return VertexSet((), (), infeasible=True)
    pts = sorted(found)
    ext = extreme_subset(pts)
    chosen = tuple(pts[i] for i in ext)
    return VertexSet(chosen, tuple(found[p] for p in chosen))


def verify_integrality(
    inst: Instance,
    W: _Matrix,
    basis_cap: int = DEFAULT_BASIS_CAP,
    y_cap: int = DEFAULT_Y_CAP,
) -> bool:
    """True iff every vertex of W-MIP(A, b) is integral.

    Only fractional fibre vertices need an extremality test: a fractional
    one is a W-MIP vertex exactly when it lies outside the hull of the others.
    """
    found = _candidates(inst, W, basis_cap, y_cap)
    pts = sorted(found)
    integral = [p for p in pts if _is_integral(p)]
    frac = [p for p in pts if not _is_integral(p)]
    for p in frac:
        # p is extreme iff outside conv(all others); integral points first
        # settle most cases cheaply
        if in_convex_hull(p, integral):
            continue
        if not in_convex_hull(p, [q for q in pts if q != p]):
            return False
    return True


# ---------------------------------------------------------------------------
# brute-force integrality number


@dataclass(frozen=True)
class IntegralityNumber:
    k: int | None
    W: IntMatrix | None
    entry_bound: int
    exact_within_class: bool = True


def _canonical_rows(n: int, entry_bound: int) -> list[tuple[int, ...]]:
    out = []
    for v in itertools.product(range(-entry_bound, entry_bound + 1), repeat=n):
        nz = next((x for x in v if x), 0)
        if nz > 0:
            out.append(v)
    return out


def integrality_number_bruteforce(
    inst: Instance,
    entry_bound: int = 2,
    kmax: int | None = None,
    max_n: int = 3,
    max_entry_bound: int = 2,
    max_candidates: int = 200_000,
) -> IntegralityNumber:
    """Smallest k with some W in [-e, e]^{k x n} making every W-MIP vertex integral.

    Rows are taken with a positive leading entry and as combinations (no
    order, no repeats), which loses nothing: sign, order and duplicates do
    not change {x : W x integral}. Exact only within the bounded-entry class.
    """
    n = inst.n
    if n > max_n or entry_bound > max_entry_bound:
        raise CapExceededError(f"n = {n}, entry bound {entry_bound} exceed the caps")
    kmax = n if kmax is None else kmax
    rows = _canonical_rows(n, entry_bound)
    for k in range(kmax + 1):
        count = math.comb(len(rows), k)
        if count > max_candidates:
            raise CapExceededError(f"{count} candidate W with {k} rows exceed cap")
        for combo in itertools.combinations(rows, k):
            W = IntMatrix(list(combo), cols=n)
            if verify_integrality(inst, W):
                return IntegralityNumber(k, W, entry_bound)
    return IntegralityNumber(None, None, entry_bound)
