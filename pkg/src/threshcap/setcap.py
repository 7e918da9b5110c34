"""Set capacity: exact threshold-function counts and bounds for finite sets."""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .core import CapExceeded, PointSet, direct_sum
from .reports import Bound, CapacityReport, log2_int
from .separability import _integer_row, feasible_direction

DEFAULT_POINT_CAP = 24

ANCHOR_UPPER = "Lemma 'Capacity of sets: upper bound'"
ANCHOR_LOWER = "Lemma 'Capacity of sets: lower bound'"
ANCHOR_BOOLEAN = "Theorem 'Capacity of a set'"
ANCHOR_CUBE = "Theorem 'Capacity of the Boolean cube'"
ANCHOR_HIER = "Lemma 'Hierarchical decomposition and capacity'"
ANCHOR_PRODUCT = "Corollary 'Capacity of product sets'"


def _homogeneous(S: PointSet) -> list[tuple[int, ...]]:
    # (x, 1) scaled to integers; a positive scale per point keeps every sign test intact
    return [tuple(_integer_row(tuple(p) + (Fraction(1),))) for p in S.points]


def _dfs(vecs, i, mask, rows, z, out):
    if i == len(vecs):
        out.append(mask)
        return
    v = vecs[i]
    t = sum(a * b for a, b in zip(v, z))
    neg = tuple(-c for c in v)
    for label, row in ((0, neg), (1, v)):
        if (label and t > 0) or (not label and t < 0):
            nz = z
        else:
            nz = feasible_direction(rows + [row])
            if nz is None:
                continue
        _dfs(vecs, i + 1, mask | (label << i), rows + [row], nz, out)


def _chunk(args):
    vecs, prefix = args
    rows = [tuple(-c for c in vecs[0])]
    mask = 0
    for i, label in enumerate(prefix, start=1):
        v = vecs[i]
        rows.append(v if label else tuple(-c for c in v))
        mask |= label << i
    z = feasible_direction(rows)
    if z is None:
        return []
    out: list[int] = []
    _dfs(vecs, len(prefix) + 1, mask, rows, z, out)
    return out


def threshold_functions(S: PointSet, cap: int = DEFAULT_POINT_CAP, jobs: int = 1) -> list[int]:
    """All threshold functions on ``S`` as sorted bit masks (bit ``i`` = value at point ``i``).

    Labelings are explored point by point; a prefix that is not separable
    is never extended, and a child inheriting the parent's witness skips
    the LP.  Only labelings with value 0 at the first point are searched;
    the rest are their complements.  With ``jobs > 1`` the labeling space
    is split into contiguous chunks by fixing the labels of the next few
    points, and the chunks are searched in worker processes.
    """
    N = len(S)
    if N > cap:
        raise CapExceeded("points", N, cap)
    if N == 0:
        return [0]
    vecs = _homogeneous(S)
    full = (1 << N) - 1
    depth = 0
    if jobs > 1:
        depth = min(N - 1, max(1, math.ceil(math.log2(4 * jobs))))
    tasks = [(vecs, prefix) for prefix in itertools.product((0, 1), repeat=depth)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_chunk, tasks))
    else:
        parts = [_chunk(t) for t in tasks]
    half = [m for part in parts for m in part]
    return sorted(half + [full ^ m for m in half])


def count_threshold_functions(S: PointSet, cap: int = DEFAULT_POINT_CAP, jobs: int = 1) -> int:
    return len(threshold_functions(S, cap=cap, jobs=jobs))


@lru_cache(maxsize=4096)
def _cached_functions(points: tuple) -> tuple[int, ...]:
    return tuple(threshold_functions(PointSet(points), cap=10 ** 6))


def cached_threshold_functions(S: PointSet) -> tuple[int, ...]:
    """Memoized :func:`threshold_functions` keyed on the ordered point tuple (no cap)."""
    return _cached_functions(S.points)


def cube_count_binomial_bound(size: int, dim: int) -> int:
    return 2 * sum(math.comb(size - 1, k) for k in range(dim + 1))


def set_capacity_bounds(S: PointSet) -> CapacityReport:
    """All set-capacity bounds that apply to ``S`` (no exact count)."""
    size, n = len(S), S.dimension
    if size < 1:
        raise ValueError("bounds need a non-empty set")
    report = CapacityReport(subject=f"set of {size} points in dimension {n}")
    report.add(
        Bound("count-upper", cube_count_binomial_bound(size, n), "upper", ANCHOR_UPPER, scale="count"),
        Bound("log-lower", 2 * size, "lower", ANCHOR_LOWER, scale="count",
              note="at least 2|S| functions, i.e. C(S) >= log2|S| + 1"),
    )
    # The binomial-sum estimate behind the log forms needs 1 <= n <= |S| - 1.
    in_range = n >= 4 and size - 1 >= n
    log_size = size.bit_length() - 1 if size & (size - 1) == 0 else log2_int(size)
    note = "" if in_range else "requires n >= 4 and |S| - 1 >= n"
    report.add(
        Bound("log-upper-entropy", 1 + n * math.log2(math.e * size / n), "upper", ANCHOR_UPPER,
              hypotheses_hold=in_range, note=note),
        Bound("log-upper", n * log_size, "upper", ANCHOR_UPPER, hypotheses_hold=in_range, note=note),
    )
    if S.is_boolean:
        report.add(
            Bound("boolean-log-lower", log2_int(size) ** 2 / 16, "lower", ANCHOR_BOOLEAN,
                  note="strict inequality; checked exactly by boolean_lower_strict"),
        )
        if size == 2 ** n:
            report.add(
                Bound("cube-lower", Fraction(n * (n - 1), 2), "lower", ANCHOR_CUBE),
                Bound("cube-upper", n * n, "upper", ANCHOR_CUBE, hypotheses_hold=n >= 2,
                      note="" if n >= 2 else "fails at n = 1: C(H^1) = 2"),
            )
    return report


def set_capacity(S: PointSet, exact: bool = True, cap: int = DEFAULT_POINT_CAP, jobs: int = 1) -> CapacityReport:
    report = set_capacity_bounds(S)
    if exact:
        report.exact_count = count_threshold_functions(S, cap=cap, jobs=jobs)
    if S.is_boolean:
        tree = decompose(S)
        report.add(Bound("hierarchical-product", tree.certified_count, "lower", ANCHOR_HIER, scale="count"))
    return report


def boolean_lower_strict(count: int, size: int) -> bool:
    """Exact check of ``log2(count) > log2(size)^2 / 16``.

    Uses ``16 log2(count) > log2(size)^2``; both sides are compared through
    integer powers when ``size`` is a power of two and through high-precision
    arithmetic otherwise.
    """
    if size & (size - 1) == 0:
        s = size.bit_length() - 1
        # count^16 > 2^(s^2)
        return count ** 16 > 2 ** (s * s)
    from decimal import Decimal, getcontext

    getcontext().prec = 60
    lc = Decimal(count).ln() / Decimal(2).ln()
    ls = Decimal(size).ln() / Decimal(2).ln()
    return 16 * lc > ls * ls


@dataclass
class DecompositionTree:
    """Coordinate-split chain ``U_{i-1} = U_i + V_i`` ending at a single point."""

    split_coordinates: list[int] = field(default_factory=list)
    u_sizes: list[int] = field(default_factory=list)  # |U_0|, |U_1|, ..., |U_K|
    leaves: list[PointSet] = field(default_factory=list)  # V_1..V_K

    @property
    def depth(self) -> int:
        return len(self.leaves)

    @property
    def leaf_sizes(self) -> list[int]:
        return [len(v) for v in self.leaves]

    @property
    def proportions(self) -> list[Fraction]:
        return [Fraction(len(v), u) for v, u in zip(self.leaves, self.u_sizes)]

    @property
    def certified_count(self) -> int:
        out = 2
        for v in self.leaves:
            out *= len(v) + 1
        return out

    @property
    def log_sum_bound(self) -> float:
        return sum(log2_int(len(v)) for v in self.leaves)


def decompose(S: PointSet) -> DecompositionTree:
    """Split on the most balanced coordinate (lowest index on ties) until one point remains."""
    if not S.is_boolean:
        raise ValueError("hierarchical decomposition needs a subset of the Boolean cube")
    if len(S) < 1:
        raise ValueError("empty set")
    tree = DecompositionTree(u_sizes=[len(S)])
    current = list(S.points)
    while len(current) > 1:
        best = None
        for i in range(S.dimension):
            ones = sum(1 for p in current if p[i] == 1)
            if 0 < ones < len(current):
                small = min(ones, len(current) - ones)
                if best is None or small > best[0]:
                    best = (small, i)
        _, coord = best
        zeros = [p for p in current if p[coord] == 0]
        ones = [p for p in current if p[coord] == 1]
        keep, leaf = (zeros, ones) if len(zeros) >= len(ones) else (ones, zeros)
        tree.split_coordinates.append(coord)
        tree.leaves.append(PointSet(tuple(leaf), S.dimension))
        tree.u_sizes.append(len(keep))
        current = keep
    return tree


@dataclass(frozen=True)
class HierarchicalBound:
    certified_count: int
    tree: DecompositionTree
    depth_bound: int  # C(S) > K
    log_sum_bound: float  # C(S) > sum log2 |V_i|


def hierarchical_lower_bound(S: PointSet) -> HierarchicalBound:
    tree = decompose(S)
    return HierarchicalBound(tree.certified_count, tree, tree.depth, tree.log_sum_bound)


def rational_rank(vectors: Sequence[Sequence]) -> int:
    rows = [[Fraction(c) for c in v] for v in vectors]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][col] != 0:
                f = rows[r][col] / rows[rank][col]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank


class RankCheckFailed(ValueError):
    pass


@dataclass(frozen=True)
class ProductBound:
    iterated_count: int  # lower bound on |T(U^p)| from repeated two-set slicing
    iterated_bits: float
    closed_form_bits: Fraction  # p^2 |U| log2|U| / 8, exact when |U| is a power of two
    closed_form_float: float


def product_capacity_lower(U: PointSet, p: int) -> ProductBound:
    """Lower bounds on the number of threshold functions on ``U + U + ... + U`` (p copies).

    The iterated form applies ``|T(U + V)| >= |T(V)| |V|^(|U|-1)`` with
    ``V = U^(p-1)``, starting from ``|T(U)| >= 2|U|``.
    """
    k = len(U)
    if k <= 1 or p <= 1:
        raise ValueError("need |U| > 1 and p > 1")
    lifted = [tuple(u) + (1,) for u in U.points]
    if rational_rank(lifted) != k:
        raise RankCheckFailed("U + 1 is not linearly independent")
    count = 2 * k
    for j in range(1, p):
        count *= (k ** j) ** (k - 1)
    if k & (k - 1) == 0:
        closed = Fraction(p * p * k * (k.bit_length() - 1), 8)
        closed_float = float(closed)
    else:
        closed_float = p * p * k * math.log2(k) / 8
        closed = Fraction(closed_float)
    return ProductBound(count, log2_int(count), closed, closed_float)


def power_set(U: PointSet, p: int) -> PointSet:
    out = U
    for _ in range(p - 1):
        out = direct_sum(out, U)
    return out


def region_count(m: int, n: int, affine: bool) -> int:
    """Regions cut by ``m`` hyperplanes in general position in ``R^n``."""
    if m < 0 or n < 1:
        raise ValueError("need m >= 0 and n >= 1")
    if affine:
        return sum(math.comb(m, k) for k in range(n + 1))
    if m == 0:
        return 1
    return 2 * sum(math.comb(m - 1, k) for k in range(n))


def vc_dimension(S: PointSet, cap: int = 2 ** 16) -> int:
    """Largest number of coordinates on which ``S`` projects onto the full cube."""
    if not S.is_boolean:
        raise ValueError("VC dimension is computed for subsets of the Boolean cube")
    if len(S) > cap:
        raise CapExceeded("points", len(S), cap)
    n = S.dimension
    pts = [tuple(int(c) for c in p) for p in S.points]
    top = min(n, len(S).bit_length() - 1)
    for size in range(top, 0, -1):
        need = 2 ** size
        for idx in itertools.combinations(range(n), size):
            if len({tuple(p[i] for i in idx) for p in pts}) == need:
                return size
    return 0
