"""Concrete threshold gadgets: equality checks, clauses, exponential and
enrichment maps, multiplexing and stacking networks.

Every builder checks its output by exhaustive evaluation before returning.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .core import (
    DEFAULT_ENUMERATION_CAP,
    Architecture,
    CapExceeded,
    DimensionError,
    LayeredNetwork,
    PointSet,
    ThresholdMap,
    ThresholdUnit,
    TruthTable,
    cube_points,
)

VERIFY_CAP = 16


class VerificationFailed(AssertionError):
    pass


def _boolean(theta: Sequence) -> tuple[int, ...]:
    bits = tuple(theta)
    if any(b not in (0, 1) for b in bits):
        raise ValueError(f"{bits} is not a Boolean vector")
    return tuple(int(b) for b in bits)


def binary_code(i: int, width: int) -> tuple[int, ...]:
    """Big-endian ``width``-bit code of ``i``."""
    if not 0 <= i < 2 ** width:
        raise ValueError(f"{i} does not fit in {width} bits")
    return tuple((i >> (width - 1 - j)) & 1 for j in range(width))


def selector_width(m: int) -> int:
    return math.ceil(math.log2(m)) if m > 1 else 0


def equality_indicator(theta: Sequence[int]) -> ThresholdUnit:
    """Unit that fires exactly at ``x = theta`` on the cube; its preactivation is 1/2 minus the Hamming distance."""
    theta = _boolean(theta)
    return ThresholdUnit(tuple(2 * t - 1 for t in theta), Fraction(1, 2) - sum(theta))


def logic_unit(kind: str, fan_in: int = 1) -> ThresholdUnit:
    kind = kind.upper()
    if fan_in < 1:
        raise ValueError("fan_in must be at least 1")
    half = Fraction(1, 2)
    if kind == "AND":
        return ThresholdUnit((1,) * fan_in, half - fan_in)
    if kind == "OR":
        return ThresholdUnit((1,) * fan_in, -half)
    if kind in ("NOT", "IDENTITY"):
        if fan_in != 1:
            raise ValueError(f"{kind} takes exactly one input")
        return ThresholdUnit((-1,), half) if kind == "NOT" else ThresholdUnit((1,), -half)
    raise ValueError(f"unknown logic unit {kind!r}")


def constant_unit(value: int, dimension: int) -> ThresholdUnit:
    return ThresholdUnit((0,) * dimension, 0 if value else -1)


def _check_cap(dimension: int, cap: int) -> None:
    if dimension > cap:
        raise CapExceeded("verification_dimension", dimension, cap)


def add_clause(u: ThresholdUnit, theta: Sequence[int], domain: PointSet | None = None,
               cap: int = VERIFY_CAP) -> ThresholdUnit:
    """Unit computing ``u(x) and (y == theta)`` on ``domain ⊕ H^q``.

    ``domain`` defaults to the cube ``H^n``.  With ``t = <a,x> + alpha`` the
    result is ``h(K (t - b) + 1/2 - dist(y, theta))``, where ``b`` is the
    largest positive value of ``t`` and ``K`` keeps ``K (t - b)`` within
    ``[-1/2, 0]`` on positives and below ``-1/2`` on negatives.
    """
    theta = _boolean(theta)
    q = len(theta)
    if domain is None:
        _check_cap(u.dimension, cap)
        domain = PointSet.cube(u.dimension)
    if domain.dimension != u.dimension:
        raise DimensionError(f"domain has dimension {domain.dimension}, unit expects {u.dimension}")
    values = [u.preactivation(x) for x in domain]
    pos = [t for t in values if t >= 0]
    neg = [t for t in values if t < 0]
    eq = equality_indicator(theta)
    if not pos:
        g = constant_unit(0, u.dimension + q)
    elif not neg:
        g = ThresholdUnit((0,) * u.dimension + eq.weights, eq.bias)
    else:
        b, g_plus, g_minus = max(pos), min(pos), max(neg)
        K = 1 / (b - g_minus)
        if b != g_plus:
            K = min(K, 1 / (2 * (b - g_plus)))
        for t in values:
            inner = K * (t - b)
            if (t >= 0 and not -Fraction(1, 2) <= inner <= 0) or (t < 0 and not inner < -Fraction(1, 2)):
                raise VerificationFailed(f"clause margin violated at t={t}")
        g = ThresholdUnit(tuple(K * a for a in u.weights) + eq.weights, K * (u.bias - b) + eq.bias)
    _check_cap(q, cap)
    for x in domain:
        fx = u(x)
        for y in cube_points(q):
            if g(tuple(x) + y) != (fx and y == theta):
                raise VerificationFailed(f"clause unit disagrees at {tuple(x) + y}")
    return g


def exponential_map(k: int, cap: int = DEFAULT_ENUMERATION_CAP) -> ThresholdMap:
    """One-hot map ``H^k -> H^{2^k}``: ``x`` with value ``v`` goes to the vector of the number ``2^v``.

    Reading outputs as a big-endian numeral, component ``j`` (from 1) fires
    exactly for the input whose value is ``2^k - j``.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if 2 ** k > 2 ** cap or k > cap:
        raise CapExceeded("exponential_width", 2 ** k, 2 ** cap)
    size = 2 ** k
    return ThresholdMap(tuple(equality_indicator(binary_code(size - j, k)) for j in range(1, size + 1)))


@dataclass(frozen=True)
class BalanceParameters:
    n: int
    m: int
    k: int
    n0: int
    m0: int
    x: Fraction  # bisection estimate of the root of 2^x / x = m / (2n)

    def check(self) -> None:
        n, m = self.n, self.m
        assert self.n0 * 2 ** self.k == self.m0 * self.k, "n0/k != m0/2^k"
        assert 2 <= self.k and 2 * self.k <= n, "k outside [2, n/2]"
        assert n <= 2 * self.n0 and self.n0 <= n, "n0 outside [n/2, n]"
        assert m <= 8 * self.m0 and 2 * self.m0 <= m, "m0 outside [m/8, m/2]"


def _balance_hypotheses(n: int, m: int) -> bool:
    # 4n <= m <= 2^(n/2), the right side compared as m^2 <= 2^n
    return n >= 4 and 4 * n <= m and m * m <= 2 ** n


def _balance_domain(n: int, m: int) -> bool:
    # the root x of 2^x / x = m / (2n) lies in [2, n/2] iff m <= 4 * 2^(n/2)
    return n >= 4 and 4 * n <= m and m * m <= 16 * 2 ** n


def balance_parameters(n: int, m: int) -> BalanceParameters:
    """Block length ``k`` and sizes ``n0, m0`` with ``n0 / k = m0 / 2^k``.

    Accepts every ``(n, m)`` whose root ``x`` lies in ``[2, n/2]``, which
    includes the range ``4n <= m <= 2^(n/2)``.
    """
    if not _balance_domain(n, m):
        raise ValueError(f"balancing needs n >= 4 and 4n <= m <= 4 * 2^(n/2); got n={n}, m={m}")
    target = Fraction(m, 2 * n)
    lo, hi = Fraction(2), Fraction(n, 2)
    # r(x) = 2^x / x increases on [2, inf); compare 2^x with target * x in floats
    # only to steer the bisection, the integer choice of k below is exact.
    while hi - lo >= Fraction(1, 2 ** 30):
        mid = (lo + hi) / 2
        if 2 ** float(mid) / float(mid) < float(target):
            lo = mid
        else:
            hi = mid
    # k is the largest integer with r(k) <= m / (2n), i.e. floor(x)
    k = 2
    while k + 1 <= n // 2 and 2 ** (k + 1) * 2 * n <= m * (k + 1):
        k += 1
    blocks = n // k
    params = BalanceParameters(n, m, k, blocks * k, blocks * 2 ** k, lo)
    params.check()
    return params


def _balanced_k(n: int, m: int) -> int | None:
    for k in range(2, n // 2 + 1):
        if n % k == 0 and (n // k) * 2 ** k == m:
            return k
    return None


@dataclass
class EnrichmentResult:
    map: ThresholdMap
    case: str  # "balanced", "identity" or "general"
    k: int | None = None
    params: BalanceParameters | None = None
    verified: bool = False


def _blockwise(n_blocks: int, k: int, n_in: int) -> list[ThresholdUnit]:
    units = []
    for b in range(n_blocks):
        for unit in exponential_map(k).units:
            w = [Fraction(0)] * n_in
            w[b * k:(b + 1) * k] = unit.weights
            units.append(ThresholdUnit(tuple(w), unit.bias))
    return units


def _coordinate(i: int, n_in: int) -> ThresholdUnit:
    w = [0] * n_in
    w[i] = 1
    return ThresholdUnit(tuple(w), Fraction(-1, 2))


def enrichment_map(n: int, m: int, cap: int = VERIFY_CAP) -> EnrichmentResult:
    """Injective threshold map ``H^n -> H^m`` whose image has large capacity."""
    allowed = _balanced_k(n, m) is not None or n <= m <= 4 * n or _balance_hypotheses(n, m)
    if n < 1 or not allowed:
        raise ValueError(f"enrichment needs n <= m <= 2^(n/2) (or m <= 4n); got n={n}, m={m}")
    k = _balanced_k(n, m)
    params = None
    if k is not None:
        units = _blockwise(n // k, k, n)
        case = "balanced"
    elif m <= 4 * n:
        units = [_coordinate(i, n) for i in range(n)]
        case = "identity"
    else:
        params = balance_parameters(n, m)
        k = params.k
        units = _blockwise(params.n0 // k, k, n)
        units += [_coordinate(i, n) for i in range(params.n0, n)]
        case = "general"
    units += [constant_unit(0, n)] * (m - len(units))
    result = EnrichmentResult(ThresholdMap(tuple(units)), case, k, params)
    if n <= cap:
        images = {result.map(x) for x in cube_points(n)}
        if len(images) != 2 ** n:
            raise VerificationFailed("enrichment map is not injective")
        result.verified = True
    return result


@dataclass(frozen=True)
class MultiplexPlan:
    m: int
    m_minus: int
    codes: tuple[tuple[int, ...], ...]  # sigma(i) for i = 1..m

    @classmethod
    def of(cls, m: int) -> "MultiplexPlan":
        if m < 1:
            raise ValueError("need at least one function")
        width = selector_width(m)
        return cls(m, width, tuple(binary_code(i, width) for i in range(m)))


def multiplex(functions: Sequence[ThresholdUnit], S: PointSet | None = None,
              cap: int = VERIFY_CAP) -> LayeredNetwork:
    """Network ``A(n + m⁻, m, 1)`` with ``f⁺(x ⊕ sigma(i)) = f_i(x)`` on ``S``."""
    functions = list(functions)
    plan = MultiplexPlan.of(len(functions))
    n = functions[0].dimension
    if S is None:
        _check_cap(n, cap)
        S = PointSet.cube(n)
    hidden = ThresholdMap(tuple(add_clause(f, code, S, cap) for f, code in zip(functions, plan.codes)))
    net = LayeredNetwork((hidden, ThresholdMap((logic_unit("OR", plan.m),))))
    for x in S:
        for y in cube_points(plan.m_minus):
            want = 0
            if y in plan.codes:
                want = functions[plan.codes.index(y)](x)
            if net(tuple(x) + y) != (want,):
                raise VerificationFailed(f"multiplexer disagrees at {tuple(x) + y}")
    return net


@dataclass
class StackPlan:
    shapes: tuple[tuple[int, ...], ...]
    L_minus: int
    codes: tuple[tuple[int, ...], ...]  # eta(k) for k = 1..K
    projections: tuple[int, ...]  # P_k keeps this many leading coordinates
    widths: list[int] = field(default_factory=list)
    width_budget: list[int] | None = None  # 2 + 2 n_k⁺ + n̄_k⁺ per layer, when a target is known


class _Layer:
    """Helper collecting units of one layer with named input blocks."""

    def __init__(self, width_in: int):
        self.width_in = width_in
        self.units: list[ThresholdUnit] = []
        self.blocks: dict[str, tuple[int, int]] = {}

    def add(self, name: str, units: Sequence[tuple[dict[int, Fraction], Fraction]]) -> None:
        start = len(self.units)
        for weights, bias in units:
            w = [Fraction(0)] * self.width_in
            for i, a in weights.items():
                w[i] = a
            self.units.append(ThresholdUnit(tuple(w), bias))
        self.blocks[name] = (start, len(self.units))


def _wire(unit: ThresholdUnit, offsets: Sequence[int]) -> tuple[dict[int, Fraction], Fraction]:
    return {o: a for o, a in zip(offsets, unit.weights)}, unit.bias


def stack(modules: Sequence[LayeredNetwork], target: Architecture | Sequence[int] | None = None,
          cap: int = VERIFY_CAP) -> tuple[LayeredNetwork, StackPlan]:
    """Stack modules of shape ``(a_k, b_k, c_k, 1)`` into one single-output network.

    On input ``x ⊕ x⁻`` the result equals ``f_k(P_k x)`` when ``x⁻ = eta(k)``
    and 0 when ``x⁻`` is not a code.  Module ``k`` reads layer ``k - 1``, its
    clause output sits in layer ``k + 2``, and an OR accumulator collects
    the module outputs upward.
    """
    modules = list(modules)
    if not modules:
        raise ValueError("need at least one module")
    shapes = []
    for net in modules:
        if len(net.architecture) != 4 or net.architecture[3] != 1:
            raise DimensionError(f"module {net.architecture} is not of shape (a, b, c, 1)")
        shapes.append(net.architecture.sizes)
    K = len(modules)
    a = [s[0] for s in shapes]
    if any(ai > a[0] for ai in a):
        raise DimensionError("module inputs must be projections of the first module's input")
    if target is not None:
        t = tuple(target)
        if len(t) != K + 3:
            raise DimensionError(f"target {t} needs {len(t) - 3} modules, got {K}")
        for k, s in enumerate(shapes):
            want = (min(t[:k + 1]), t[k + 1], t[k + 2], 1)
            if s != want:
                raise DimensionError(f"module {k + 1} has shape {s}, target expects {want}")
    Lm = selector_width(K)
    codes = tuple(binary_code(i, Lm) for i in range(K))
    # x-copy width carried at layer l, for modules reading layer l
    xwidth = [max(a[k] for k in range(l, K)) if l < K else 0 for l in range(K + 3)]
    xwidth[0] = a[0]

    # layer 0 layout: x block then x⁻
    blocks = {"x": (0, a[0]), "sel": (a[0], a[0] + Lm)}
    width = a[0] + Lm
    layers = []
    for l in range(1, K + 4):
        layer = _Layer(width)
        final = l == K + 3
        xs, _ = blocks["x"] if "x" in blocks else (0, 0)
        if not final and l < K:
            layer.add("x", [_wire(logic_unit("IDENTITY"), [xs + i]) for i in range(xwidth[l])])
        if not final and l <= K + 1:
            ss, se = blocks["sel"]
            layer.add("sel", [_wire(logic_unit("IDENTITY"), [i]) for i in range(ss, se)])
        if l <= K:  # first hidden layer of module l
            units = modules[l - 1].layers[0].units
            layer.add(f"h1_{l}", [_wire(u, range(xs, xs + a[l - 1])) for u in units])
        if 1 <= l - 1 <= K:  # second hidden layer of module l - 1
            hs, he = blocks[f"h1_{l - 1}"]
            layer.add(f"h2_{l - 1}", [_wire(u, range(hs, he)) for u in modules[l - 2].layers[1].units])
        if 1 <= l - 2 <= K:  # clause output of module l - 2
            k = l - 2
            hs, he = blocks[f"h2_{k}"]
            ss, se = blocks["sel"]
            out = modules[k - 1].layers[2].units[0]
            g = add_clause(out, codes[k - 1], cap=cap)
            layer.add(f"f_{k}", [_wire(g, list(range(hs, he)) + list(range(ss, se)))])
        inputs = []
        if "acc" in blocks:
            inputs.append(blocks["acc"][0])
        if f"f_{l - 3}" in blocks:
            inputs.append(blocks[f"f_{l - 3}"][0])
        if inputs and (final or l >= 4):
            layer.add("acc", [_wire(logic_unit("OR", len(inputs)), inputs)])
        layers.append(ThresholdMap(tuple(layer.units)))
        blocks = layer.blocks
        width = len(layer.units)
    net = LayeredNetwork(tuple(layers))
    plan = StackPlan(tuple(shapes), Lm, codes, tuple(a), list(net.architecture.sizes))
    if target is not None:
        t = tuple(target)
        plan.width_budget = [2 + 3 * Lm + 2 * t[l] + min(t[:l + 1]) for l in range(len(t))]
    _verify_stack(net, modules, plan, cap)
    return net, plan


def _verify_stack(net: LayeredNetwork, modules, plan: StackPlan, cap: int) -> None:
    n = net.input_dimension
    _check_cap(n, cap)
    a0 = plan.projections[0]
    for point in cube_points(n):
        x, sel = point[:a0], point[a0:]
        want = 0
        if sel in plan.codes:
            k = plan.codes.index(sel)
            want = modules[k](x[:plan.projections[k]])[0]
        if net(point) != (want,):
            raise VerificationFailed(f"stacked network disagrees at {point}")


def verify_equivalence(net: LayeredNetwork, reference: TruthTable,
                       cap: int = DEFAULT_ENUMERATION_CAP) -> tuple[bool, tuple[int, ...] | None]:
    """Compare ``net`` with ``reference`` on every input; return the first mismatch if any."""
    n = net.input_dimension
    if n > cap:
        raise CapExceeded("input_dimension", n, cap)
    if reference.n != n or reference.m != net.output_dimension:
        raise DimensionError(f"reference is H^{reference.n} -> H^{reference.m}, network is {net.architecture}")
    for x, want in reference.items():
        if net(x) != want:
            return False, x
    return True, None


def network_from_units(units_per_layer: Sequence[Sequence[ThresholdUnit]]) -> LayeredNetwork:
    return LayeredNetwork(tuple(ThresholdMap(tuple(units)) for units in units_per_layer))


def image_points(result: EnrichmentResult, n: int) -> PointSet:
    """Image ``F(H^n)`` of an enrichment map as a point set."""
    return PointSet(tuple(result.map(x) for x in cube_points(n)))

