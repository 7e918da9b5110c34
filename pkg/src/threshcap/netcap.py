"""Network capacity: exact function enumeration for small architectures and formula bounds."""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import Architecture, CapExceeded, PointSet, TruthTable, cube_points
from .reports import Bound, CapacityReport
from .setcap import cached_threshold_functions, vc_dimension

ANCHOR_MAIN = "Theorem 'main'"
ANCHOR_UPPER = "Proposition 'Capacity formula: upper bounds'"
ANCHOR_OUTPUT = "Corollary 'Adding an output node'"
ANCHOR_HIDDEN = "Theorem 'effect of a hidden layer: lower bound'"
ANCHOR_CUBE = "Theorem 'Capacity of the Boolean cube'"
ANCHOR_TWO = "Lemma 'Basic properties of capacity', property 5"
ANCHOR_RESTRICTED = "Lemma 'Restricted vs. unrestricted capacity'"
ANCHOR_SAUER = "Proposition 'Restricted capacity: a lower bound'"

# A function S -> H^k is stored as k bit masks over the indices of S.
Function = tuple[int, ...]


class BudgetExceeded(CapExceeded):
    pass


@dataclass(frozen=True)
class Budget:
    max_layer_functions: int = 512
    max_depth: int = 4  # number of weight layers, L - 1
    max_points: int = 16

    @classmethod
    def parse(cls, items: Sequence[str]) -> "Budget":
        """Build from ``name=value`` strings, e.g. ``max_layer_functions=4096``."""
        values = {}
        for item in items:
            name, _, raw = item.partition("=")
            name = name.strip().replace("-", "_")
            if name not in cls.__dataclass_fields__:
                raise ValueError(f"unknown budget {name!r}")
            values[name] = int(raw)
        return cls(**values)


UNLIMITED = Budget(10 ** 9, 10 ** 9, 10 ** 9)


def _check(name: str, value: int, limit: int) -> None:
    if value > limit:
        raise BudgetExceeded(name, value, limit)


def _image(phi: Function, size: int):
    """Distinct image points of ``phi`` and, for each, the mask of its preimage."""
    pre: dict[tuple[int, ...], int] = {}
    for s in range(size):
        point = tuple((mask >> s) & 1 for mask in phi)
        pre[point] = pre.get(point, 0) | (1 << s)
    points = sorted(pre)
    return points, [pre[p] for p in points]


def _pullbacks(phi: Function, size: int) -> list[int]:
    points, pre = _image(phi, size)
    V = PointSet(tuple(points), len(phi))
    out = []
    for psi in cached_threshold_functions(V):
        mask = 0
        j = 0
        while psi:
            if psi & 1:
                mask |= pre[j]
            psi >>= 1
            j += 1
        out.append(mask)
    return out


def _extend(args) -> set[Function]:
    phis, size, width, limit = args
    out: set[Function] = set()
    for phi in phis:
        pulled = _pullbacks(phi, size)
        _check("max_layer_functions", len(pulled) ** width, limit)
        out.update(itertools.product(pulled, repeat=width))
        _check("max_layer_functions", len(out), limit)
    return out


def enumerate_network_functions(arch: Architecture, S: PointSet | None = None,
                                budget: Budget = Budget(), jobs: int = 1) -> set[Function]:
    """Every function ``S -> H^{n_L}`` computable by ``arch``.

    Layer by layer: for each distinct function reaching layer ``k`` the
    next layer's units range over all threshold functions on its image,
    and results are deduplicated by the function they induce on ``S``.
    """
    arch = Architecture(tuple(arch))
    if S is None:
        S = PointSet.cube(arch[0])
    if S.dimension != arch[0]:
        raise ValueError(f"input set has dimension {S.dimension}, architecture expects {arch[0]}")
    if len(arch) < 2:
        raise ValueError("an architecture needs at least one layer of units")
    _check("max_depth", len(arch) - 1, budget.max_depth)
    _check("max_points", len(S), budget.max_points)
    size = len(S)
    base = list(cached_threshold_functions(S))
    _check("max_layer_functions", len(base) ** arch[1], budget.max_layer_functions)
    current: set[Function] = set(itertools.product(base, repeat=arch[1]))
    for width in arch.sizes[2:]:
        phis = sorted(current)
        limit = budget.max_layer_functions
        if jobs > 1 and len(phis) > 1:
            step = -(-len(phis) // jobs)
            tasks = [(phis[i:i + step], size, width, limit) for i in range(0, len(phis), step)]
            nxt: set[Function] = set()
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                for part in pool.map(_extend, tasks):
                    nxt |= part
                    _check("max_layer_functions", len(nxt), limit)
        else:
            nxt = _extend((phis, size, width, limit))
        current = nxt
    return current


def naive_network_functions(arch: Architecture, S: PointSet | None = None) -> set[Function]:
    """Independent oracle: compose every tuple of threshold maps on full cubes.

    Hidden layers range over all threshold maps ``H^{n_k} -> H^{n_{k+1}}``
    (not just those on the image), and each weight-layer combination is
    evaluated point by point.  Exponential; tiny architectures only.
    """
    arch = Architecture(tuple(arch))
    if S is None:
        S = PointSet.cube(arch[0])
    size = len(S)

    def tables(domain: PointSet, width: int) -> list[tuple[int, ...]]:
        fns = cached_threshold_functions(domain)
        out = []
        for combo in itertools.product(fns, repeat=width):
            # output index with the first unit as most significant bit
            out.append(tuple(
                sum(((combo[u] >> s) & 1) << (width - 1 - u) for u in range(width))
                for s in range(len(domain))
            ))
        return out

    layers = [tables(S, arch[1])]
    for k in range(1, len(arch) - 1):
        layers.append(tables(PointSet.cube(arch[k]), arch[k + 1]))
    width = arch[-1]
    found: set[Function] = set()
    for combo in itertools.product(*layers):
        outs = []
        for s in range(size):
            v = combo[0][s]
            for table in combo[1:]:
                v = table[v]
            outs.append(v)
        found.add(tuple(
            sum(((outs[s] >> (width - 1 - u)) & 1) << s for s in range(size))
            for u in range(width)
        ))
    return found


def to_truth_table(fn: Function, n: int) -> TruthTable:
    return TruthTable(n, len(fn), tuple(
        tuple((mask >> s) & 1 for mask in fn) for s in range(2 ** n)
    ))


@dataclass(frozen=True)
class EstimatedCapacity:
    value: int
    terms: tuple[int, ...]
    bottlenecks: tuple[int, ...]


def estimated_capacity(arch: Architecture | Sequence[int]) -> EstimatedCapacity:
    """``sum_k min(n_1..n_k) n_k n_{k+1}`` with its per-term breakdown."""
    sizes = tuple(arch)
    if len(sizes) < 2:
        raise ValueError("need at least two layers")
    terms, mins = [], []
    running = sizes[0]
    for a, b in zip(sizes, sizes[1:]):
        running = min(running, a)
        mins.append(running)
        terms.append(running * a * b)
    return EstimatedCapacity(sum(terms), tuple(terms), tuple(mins))


def network_upper_bounds(arch: Architecture, input_log_cardinality=None) -> CapacityReport:
    arch = Architecture(tuple(arch))
    sizes = arch.sizes
    if len(sizes) < 2:
        raise ValueError("need at least two layers")
    ok = all(s >= 4 for s in sizes[:-1])
    note = "" if ok else "outside hypotheses: some non-output layer has fewer than 4 nodes"
    report = CapacityReport(subject=str(arch))
    if input_log_cardinality is None:
        report.add(Bound("capacity-formula-upper", estimated_capacity(sizes).value, "upper",
                         ANCHOR_UPPER, hypotheses_hold=ok, note=note))
    else:
        n = input_log_cardinality
        value = n * sizes[0] * sizes[1]
        running = n
        for k in range(1, len(sizes) - 1):
            running = min(running, sizes[k])
            value += running * sizes[k] * sizes[k + 1]
        report.add(Bound("restricted-formula-upper", value, "upper", ANCHOR_UPPER,
                         hypotheses_hold=ok, note=note))
    if len(sizes) >= 3 and sizes[-1] == 1:
        report.add(Bound("single-output-upper", estimated_capacity(sizes[:-1]).value, "upper",
                         ANCHOR_OUTPUT, hypotheses_hold=False,
                         note="holds up to an unspecified absolute constant"))
    return report


class BoundUnavailable(ValueError):
    pass


def _cube_count(n: int) -> int | None:
    if n <= 4:
        return len(cached_threshold_functions(PointSet.cube(n)))
    return None


def multiplexing_lower_bound(n: int, m: int) -> Bound:
    """Lower bound on ``C(n, m, 1)`` from routing ``m`` functions on ``H^{n - ceil(log2 m)}``."""
    selector = math.ceil(math.log2(m)) if m > 1 else 0
    k = n - selector
    if k < 1:
        raise BoundUnavailable(f"n={n} leaves no room beside {selector} selector bits")
    count = _cube_count(k)
    if count is not None:
        return Bound("multiplexing-lower", count ** m, "lower", ANCHOR_HIDDEN, scale="count",
                     note=f"|T(H^{k})|^{m} with exact cube count")
    return Bound("multiplexing-lower", Fraction(m * k * (k - 1), 2), "lower", ANCHOR_HIDDEN,
                 note=f"{m} * C(H^{k}) with the cube lower bound")


def network_lower_bounds(arch: Architecture) -> CapacityReport:
    arch = Architecture(tuple(arch))
    sizes = arch.sizes
    if len(sizes) < 2:
        raise ValueError("need at least two layers")
    report = CapacityReport(subject=str(arch))
    n1 = sizes[0]
    if len(sizes) == 2:
        m = sizes[1]
        report.add(Bound("cube-lower", Fraction(m * n1 * (n1 - 1), 2), "lower", ANCHOR_CUBE,
                         note="m * n(n-1)/2, using C(S, n, m) = C(S) m"))
        count = _cube_count(n1)
        if count is not None:
            report.add(Bound("two-layer-exact", count ** m, "lower", ANCHOR_TWO, scale="count"))
    if len(sizes) == 3 and sizes[2] == 1:
        try:
            report.add(multiplexing_lower_bound(n1, sizes[1]))
        except BoundUnavailable as exc:
            report.notes.append(f"multiplexing bound unavailable: {exc}")
    report.add(Bound("capacity-formula-order", estimated_capacity(sizes).value, "lower", ANCHOR_MAIN,
                     hypotheses_hold=False, note="order of magnitude only; absolute constant unspecified"))
    return report


def exact_network_capacity(arch: Architecture, budget: Budget = Budget(), jobs: int = 1) -> CapacityReport:
    arch = Architecture(tuple(arch))
    count = len(enumerate_network_functions(arch, budget=budget, jobs=jobs))
    report = CapacityReport(subject=str(arch), exact_count=count)
    report.bounds.extend(network_lower_bounds(arch).bounds)
    report.bounds.extend(network_upper_bounds(arch).bounds)
    return report


@dataclass
class RestrictedReport:
    vc_dimension: int
    sauer_shelah_holds: bool
    dimension_estimate: float | None
    report: CapacityReport


def restricted_capacity_bounds(S: PointSet, tail: Sequence[int], budget: Budget = Budget()) -> RestrictedReport:
    """Bounds on ``C(S, n_1, tail...)`` for Boolean ``S`` via its VC dimension."""
    if not S.is_boolean:
        raise ValueError("restricted capacity bounds need a subset of the Boolean cube")
    tail = tuple(tail)
    n1 = S.dimension
    d = vc_dimension(S)
    size = len(S)
    sauer = size <= sum(math.comb(n1, k) for k in range(d + 1))
    log_size = size.bit_length() - 1 if size & (size - 1) == 0 else math.log2(size)
    estimate = None
    if 0 < log_size < n1:
        estimate = log_size / math.log2(math.e * n1 / log_size)
    report = CapacityReport(subject=f"C(S,{n1},{','.join(map(str, tail))}) with |S|={size}")
    if d == 0:
        report.notes.append("VC dimension 0: only the trivial lower bound applies")
    else:
        sub = Architecture((d,) + tail)
        try:
            count = len(enumerate_network_functions(sub, budget=budget))
            report.add(Bound("vc-reduction-lower", count, "lower", ANCHOR_RESTRICTED, scale="count",
                             note=f"exact count of {sub}"))
        except BudgetExceeded as exc:
            report.notes.append(f"exact C{sub} refused ({exc}); formula bounds used")
            for b in network_lower_bounds(sub).bounds:
                report.add(Bound("vc-reduction-" + b.name, b.value, "lower", ANCHOR_RESTRICTED,
                                 scale=b.scale, hypotheses_hold=b.hypotheses_hold, note=b.note))
    upper = network_upper_bounds(Architecture((n1,) + tail), input_log_cardinality=log_size)
    report.bounds.extend(b for b in upper.bounds if b.name == "restricted-formula-upper")
    if estimate is not None:
        report.notes.append(f"Sauer-Shelah estimate: d >~ {estimate:.6f} ({ANCHOR_SAUER})")
    return RestrictedReport(d, sauer, estimate, report)
