"""Column covering: finite B, T with C contained in B + (T u {0}).

Besides the trivial cover (B = C) this module builds the box-and-translates
cover of a lower-triangular matrix, picks its box sizes so that the cost is
O(sqrt(det)), combines covers by Cartesian products and, at desk scale,
finds optimal covers by exhaustive search.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import CapExceededError, CoverError, DimensionError, InternalConsistencyError
from .exactla import IntMatrix, _Matrix

Point = tuple


def canon(x):
    """Canonical scalar: int when integral, reduced Fraction otherwise."""
    if isinstance(x, bool):
        raise TypeError("booleans are not coordinates")
    if isinstance(x, int):
        return x
    f = Fraction(x)
    return f.numerator if f.denominator == 1 else f


def _pt(p: Iterable) -> Point:
    return tuple(canon(x) for x in p)


def _add(a: Point, b: Point) -> Point:
    return tuple(canon(x + y) for x, y in zip(a, b))


def _sub(a: Point, b: Point) -> Point:
    return tuple(canon(x - y) for x, y in zip(a, b))


@dataclass(frozen=True)
class PointSet:
    """A finite, duplicate-free, ordered set of exact points of dimension ``dim``."""

    dim: int
    points: tuple[Point, ...] = ()

    def __post_init__(self):
        seen = {}
        for p in self.points:
            p = _pt(p)
            if len(p) != self.dim:
                raise DimensionError(f"point {p} does not have dimension {self.dim}")
            seen.setdefault(p, None)
        object.__setattr__(self, "points", tuple(seen))

    @classmethod
    def of(cls, points: Iterable[Sequence], dim: int | None = None) -> "PointSet":
        pts = [_pt(p) for p in points]
        if dim is None:
            if not pts:
                raise DimensionError("dimension of an empty point set is ambiguous")
            dim = len(pts[0])
        return cls(dim, tuple(pts))

    @classmethod
    def from_columns(cls, M: _Matrix) -> "PointSet":
        return cls(M.rows, tuple(M.col(j) for j in range(M.cols)))

    @classmethod
    def psi(cls, alphas: Sequence[int]) -> "PointSet":
        """The box {0..a_1-1} x ... x {0..a_l-1}."""
        return cls(len(alphas), tuple(itertools.product(*(range(a) for a in alphas))))

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, p):
        return _pt(p) in self._index

    @property
    def _index(self) -> dict:
        idx = self.__dict__.get("_idx")
        if idx is None:
            idx = {p: i for i, p in enumerate(self.points)}
            object.__setattr__(self, "_idx", idx)
        return idx

    def index(self, p) -> int:
        return self._index[_pt(p)]


@dataclass(frozen=True)
class Cover:
    """A solution (B, T) of the covering problem with an explicit assignment.

    ``assignment`` maps each covered point c to ``(i, j)`` such that
    ``c == B[i] + T[j]``, with ``j is None`` meaning the zero translation.
    """

    B: PointSet
    T: PointSet
    assignment: dict = field(default_factory=dict, compare=False)

    @property
    def cost(self) -> int:
        return len(self.B) + len(self.T)

    @property
    def dim(self) -> int:
        return self.B.dim

    @property
    def covered(self) -> tuple[Point, ...]:
        return tuple(self.assignment)

    def represent(self, c) -> Point:
        i, j = self.assignment[_pt(c)]
        b = self.B.points[i]
        return b if j is None else _add(b, self.T.points[j])


def _find_assignment(c: Point, B: PointSet, T: PointSet):
    # lowest B index first; for a fixed b the translation c - b is forced.
    # Plain subtraction is enough for lookups: equal Fractions and ints hash alike.
    zero = (0,) * len(c)
    bidx, tidx = B._index, T._index
    if len(T) + 1 < len(B):
        best = bidx.get(c)
        for t in T.points:
            i = bidx.get(tuple(x - y for x, y in zip(c, t)))
            if i is not None and (best is None or i < best):
                best = i
        if best is None:
            return None
        t = tuple(x - y for x, y in zip(c, B.points[best]))
        return (best, None) if t == zero else (best, tidx[t])
    for i, b in enumerate(B.points):
        t = tuple(x - y for x, y in zip(c, b))
        if t == zero:
            return (i, None)
        j = tidx.get(t)
        if j is not None:
            return (i, j)
    return None


def _assign_all(points: Iterable[Point], B: PointSet, T: PointSet) -> dict:
    out = {}
    for c in points:
        c = _pt(c)
        a = _find_assignment(c, B, T)
        if a is None:
            raise CoverError(f"point {c} is not covered")
        out[c] = a
    return out


def _make_cover(B: PointSet, T: PointSet, points: Iterable[Point]) -> Cover:
    zero = (0,) * B.dim
    if zero in T._index:
        raise CoverError("the translation set must not contain 0")
    return Cover(B, T, _assign_all(points, B, T))


def cover_trivial(C: PointSet) -> Cover:
    """B = C, T = empty."""
    if len(C) == 0:
        raise CoverError("cannot cover an empty point set trivially")
    return _make_cover(C, PointSet(C.dim), C.points)


def verify_cover(C: PointSet, cover: Cover) -> bool:
    """True iff every point of C is represented as b + t with t in T u {0}.

    Recorded assignments are checked exactly; points without one are
    searched for directly.
    """
    if C.dim != cover.B.dim or cover.T.dim != cover.B.dim:
        return False
    zero = (0,) * C.dim
    if zero in cover.T._index:
        return False
    for c in C.points:
        a = cover.assignment.get(c)
        if a is not None:
            i, j = a
            if not 0 <= i < len(cover.B):
                return False
            if j is not None and not 0 <= j < len(cover.T):
                return False
            if cover.represent(c) != c:
                return False
        elif _find_assignment(c, cover.B, cover.T) is None:
            return False
    if C.points and cover.cost < math.isqrt(len(C) - 1) + 1:
        raise InternalConsistencyError("accepted cover beats the sqrt(|C|) lower bound")
    return True


# ---------------------------------------------------------------------------
# box-and-translates construction


@dataclass(frozen=True)
class KChoice:
    """Box sizes for the box-and-translates cover.

    ``alphas``, ``k`` and ``betas`` are aligned with the diagonal of the
    lower-triangular matrix being covered (input order), ``order`` is the
    ascending permutation used by the case analysis.
    """

    alphas: tuple[int, ...]
    k: tuple[int, ...]
    betas: tuple[int, ...]
    case: str
    order: tuple[int, ...]

    @property
    def delta(self) -> int:
        return math.prod(self.alphas)

    @property
    def cost(self) -> int:
        return box_cover_cost(self.alphas, self.k)


def betas_for(alphas: Sequence[int], k: Sequence[int]) -> tuple[int, ...]:
    return tuple((a - 1) // (ki + 1) for a, ki in zip(alphas, k))


def box_cover_cost(alphas: Sequence[int], k: Sequence[int]) -> int:
    """|B| + |T| of the box-and-translates cover, in closed form."""
    box = math.prod(ki + 1 for ki in k)
    t = math.prod(b + 1 for b in betas_for(alphas, k)) - 1
    return box + len(alphas) + t


def box_cost_bound(delta: int) -> float:
    """4 sqrt(delta) + log2(delta)."""
    return 4 * math.sqrt(delta) + math.log2(delta)


def _ceil_ratio_sqrt(num: int, d: int) -> int:
    """Smallest integer k >= 0 with k * sqrt(d) >= num (num >= 0, d >= 1)."""
    k = math.isqrt(num * num // d)
    while k * k * d < num * num:
        k += 1
    while k > 0 and (k - 1) * (k - 1) * d >= num * num:
        k -= 1
    return k


def choose_k(alphas: Sequence[int]) -> KChoice:
    """Box sizes giving cost at most 4 sqrt(delta) + log2(delta).

    Works on the ascending order of the alphas. If the largest alpha is at
    least sqrt(delta) the last coordinate gets ceil(alpha_l / sqrt(delta))
    and the others their full range. Otherwise, with gamma the largest
    prefix product not exceeding sqrt(delta), the prefix gets 0, the next
    coordinate ceil(alpha_{j+1} gamma / sqrt(delta)) and the rest their full
    range. Every comparison with sqrt(delta) is done in integers.
    """
    alphas = tuple(int(a) for a in alphas)
    if not alphas:
        raise DimensionError("choose_k needs at least one alpha")
    if any(a < 2 for a in alphas):
        raise DimensionError(f"alphas must be >= 2, got {alphas}")
    order = tuple(sorted(range(len(alphas)), key=lambda i: (alphas[i], i)))
    a = [alphas[i] for i in order]
    ell = len(a)
    d = math.prod(a)
    if a[-1] * a[-1] >= d:
        case = "case1"
        ks = [x - 1 for x in a[:-1]] + [_ceil_ratio_sqrt(a[-1], d)]
    else:
        case = "case2"
        if ell <= 2:
            raise InternalConsistencyError("two sorted alphas always fall in case 1")
        gamma, j = 1, 0
        while j < ell and (gamma * a[j]) ** 2 <= d:
            gamma *= a[j]
            j += 1
        ks = [0] * j + [_ceil_ratio_sqrt(a[j] * gamma, d)] + [x - 1 for x in a[j + 1 :]]
    ks = [min(max(x, 0), al - 1) for x, al in zip(ks, a)]
    k = [0] * ell
    for pos, i in enumerate(order):
        k[i] = ks[pos]
    choice = KChoice(alphas, tuple(k), betas_for(alphas, k), case, order)
    cost = choice.cost
    if cost > box_cost_bound(d) * (1 + 1e-9):
        raise InternalConsistencyError(
            f"cost {cost} exceeds 4 sqrt(delta) + log2(delta) for alphas {alphas}"
        )
    return choice


def _check_lambda(Lam: IntMatrix) -> tuple[int, ...]:
    if not Lam.is_square:
        raise DimensionError(f"Lambda must be square, got {Lam.shape}")
    ell = Lam.rows
    alphas = tuple(Lam[i, i] for i in range(ell))
    for i in range(ell):
        if alphas[i] < 2:
            raise DimensionError(f"diagonal entry {i} of Lambda is {alphas[i]} < 2")
        for j in range(ell):
            x = Lam[i, j]
            if j > i and x != 0:
                raise DimensionError("Lambda has a nonzero entry above the diagonal")
            if j < i and not 0 <= x < alphas[i]:
                raise DimensionError(f"Lambda[{i},{j}] = {x} is outside [0, {alphas[i]})")
    return alphas


def cover_box(Lam: IntMatrix, k: KChoice | Sequence[int], points: Iterable[Sequence] | None = None) -> Cover:
    """Box-and-translates cover of Psi(Lambda) u columns(Lambda).

    B is the box {0..k_1} x ... x {0..k_l} plus the columns of Lambda; T is
    the grid of multiples {0, k_i+1, ..., beta_i (k_i+1)} per coordinate,
    without the origin. ``points`` selects what gets an assignment (default:
    all of Psi(Lambda) and the columns of Lambda).
    """
    Lam = Lam if isinstance(Lam, IntMatrix) else IntMatrix(Lam)
    alphas = _check_lambda(Lam)
    ks = tuple(k.k if isinstance(k, KChoice) else k)
    if len(ks) != len(alphas):
        raise DimensionError("k has the wrong length")
    for ki, a in zip(ks, alphas):
        if not 0 <= ki <= a - 1:
            raise DimensionError(f"k entry {ki} outside [0, {a - 1}]")
    ell = len(alphas)
    betas = betas_for(alphas, ks)
    cols = [Lam.col(j) for j in range(ell)]
    box = list(itertools.product(*(range(ki + 1) for ki in ks)))
    B = PointSet(ell, tuple(box) + tuple(cols))
    steps = [[s * (ki + 1) for s in range(b + 1)] for ki, b in zip(ks, betas)]
    zero = (0,) * ell
    T = PointSet(ell, tuple(t for t in itertools.product(*steps) if t != zero))
    if points is None:
        points = itertools.chain(itertools.product(*(range(a) for a in alphas)), cols)
    return _make_cover(B, T, points)


def cover_product(c1: Cover, c2: Cover, points: Iterable[Sequence] | None = None) -> Cover:
    """Cartesian-product cover of C1 x C2 (points are concatenated vectors).

    ``points`` defaults to every pair of points covered by the factors; each
    must split into a covered point of ``c1`` followed by one of ``c2``.
    """
    d1, d2 = c1.dim, c2.dim
    B = PointSet(d1 + d2, tuple(b1 + b2 for b1 in c1.B.points for b2 in c2.B.points))
    z1, z2 = (0,) * d1, (0,) * d2
    T1 = (z1,) + c1.T.points
    T2 = (z2,) + c2.T.points
    T = PointSet(d1 + d2, tuple(t1 + t2 for t1 in T1 for t2 in T2)[1:])
    nB2 = len(c2.B)
    nT2 = len(T2)
    if points is None:
        points = (p + q for p in c1.covered for q in c2.covered)
    assignment = {}
    for c in points:
        c = _pt(c)
        p, q = c[:d1], c[d1:]
        try:
            i1, j1 = c1.assignment[p]
            i2, j2 = c2.assignment[q]
        except KeyError:
            raise CoverError(f"point {c} is not covered by the factor covers") from None
        jj = (0 if j1 is None else j1 + 1) * nT2 + (0 if j2 is None else j2 + 1)
        assignment[c] = (i1 * nB2 + i2, None if jj == 0 else jj - 1)
    return Cover(B, T, assignment)


# ---------------------------------------------------------------------------
# exhaustive optimum


DEFAULT_MAX_POINTS = 25
DEFAULT_MAX_GRID = 60


def default_grid(C: PointSet) -> PointSet:
    """C u (C - C)."""
    diffs = (_sub(p, q) for p in C.points for q in C.points)
    return PointSet(C.dim, C.points + tuple(diffs))


def cover_optimal_bruteforce(
    C: PointSet,
    grid: PointSet | None = None,
    max_points: int = DEFAULT_MAX_POINTS,
    max_grid: int = DEFAULT_MAX_GRID,
) -> Cover:
    """Minimum-cost cover with B and T drawn from ``grid``.

    Iterative deepening on the cost; inside each round a depth-first search
    always branches on the lexicographically smallest uncovered point and
    prunes with a counting bound (B' new base points and T' new translations
    can cover at most |B||T'| + |B'|(|T| + |T'| + 1) new points). The first
    round that succeeds is optimal within the grid.
    """
    if len(C) == 0:
        raise CoverError("cannot cover an empty point set")
    if len(C) > max_points:
        raise CapExceededError(f"|C| = {len(C)} exceeds cap {max_points}")
    grid = default_grid(C) if grid is None else grid
    if len(grid) > max_grid:
        raise CapExceededError(f"grid size {len(grid)} exceeds cap {max_grid}")
    if grid.dim != C.dim:
        raise DimensionError("grid and C differ in dimension")
    zero = (0,) * C.dim
    gset = set(grid.points)
    targets = sorted(C.points)
    n = len(targets)

    # options[c] = [(b, t)] with b in grid and t = c - b in grid u {0}
    options = {}
    for c in targets:
        opts = []
        for b in grid.points:
            t = _sub(c, b)
            if t == zero or t in gset:
                opts.append((b, t))
        options[c] = opts

    def covered_by(Bs, Ts):
        tz = Ts | {zero}
        return {c for c in targets if any(_sub(c, t) in Bs for t in tz)}

    def feasible_bound(nb, nt, ncov, budget):
        for x in range(budget + 1):
            y = budget - x
            if ncov + nb * y + x * (nt + y + 1) >= n:
                return True
        return False

    def search(Bs, Ts, budget):
        cov = covered_by(Bs, Ts)
        if len(cov) == n:
            return Bs, Ts
        if budget == 0 or not feasible_bound(len(Bs), len(Ts), len(cov), budget):
            return None
        c = next(p for p in targets if p not in cov)
        cheap, dear = [], []
        for b, t in options[c]:
            need = (b not in Bs) + (t != zero and t not in Ts)
            (cheap if need == 1 else dear).append((b, t, need))
        for b, t, need in cheap + dear:
            if need > budget:
                continue
            nb = Bs | {b}
            nt = Ts | {t} if t != zero else Ts
            found = search(nb, nt, budget - need)
            if found is not None:
                return found
        return None

    lower = math.isqrt(n - 1) + 1
    for s in range(lower, n + 1):
        found = search(frozenset(), frozenset(), s)
        if found is not None:
            Bs, Ts = found
            B = PointSet(C.dim, tuple(sorted(Bs)))
            T = PointSet(C.dim, tuple(sorted(Ts)))
            return _make_cover(B, T, C.points)
    raise CoverError("no cover exists with B and T inside the grid")
