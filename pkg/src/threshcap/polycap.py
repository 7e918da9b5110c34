"""Polynomial threshold capacity through the monomial lift."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .core import PointSet
from .reports import Bound, CapacityReport, log2_int
from .setcap import ANCHOR_BOOLEAN, ANCHOR_LOWER, DEFAULT_POINT_CAP, count_threshold_functions, cube_count_binomial_bound

ANCHOR_POLY_SET = "Theorem 'Polynomial set capacity'"
ANCHOR_POLY_NET = "Theorem 'Polynomial capacity of a single-hidden-layer network'"

# rational enclosure of e; upper bounds use E_HIGH
E_LOW = Fraction(2718281, 10 ** 6)
E_HIGH = Fraction(2718282, 10 ** 6)


def monomial_count(n: int, d: int) -> int:
    """``M(n, d)``: coefficients of a degree-``d`` polynomial in ``n`` variables, constant included."""
    if n < 1 or d < 0:
        raise ValueError("need n >= 1 and d >= 0")
    return sum(math.comb(n + k - 1, k) for k in range(d + 1))


@dataclass(frozen=True)
class MonomialBasis:
    n: int
    d: int
    monomials: tuple[tuple[int, ...], ...]  # exponent vectors, degrees 1..d

    @classmethod
    def of(cls, n: int, d: int) -> "MonomialBasis":
        if d < 1:
            raise ValueError("degree must be at least 1")
        monomials = []
        for degree in range(1, d + 1):
            # graded lexicographic: within a degree, larger powers of x_1 first
            block = [e for e in itertools.product(range(degree, -1, -1), repeat=n) if sum(e) == degree]
            monomials.extend(block)
        return cls(n, d, tuple(monomials))

    def __len__(self) -> int:
        return len(self.monomials)

    def evaluate(self, x) -> tuple[Fraction, ...]:
        out = []
        for e in self.monomials:
            value = Fraction(1)
            for xi, p in zip(x, e):
                if p:
                    value *= Fraction(xi) ** p
            out.append(value)
        return tuple(out)


def monomial_lift(S: PointSet, d: int) -> PointSet:
    basis = MonomialBasis.of(S.dimension, d)
    return PointSet(tuple(basis.evaluate(x) for x in S), len(basis))


def _log2_size(size: int):
    return size.bit_length() - 1 if size & (size - 1) == 0 else math.log2(size)


def poly_set_bounds(S: PointSet, d: int) -> CapacityReport:
    size, n = len(S), S.dimension
    M = monomial_count(n, d)
    report = CapacityReport(subject=f"degree-{d} capacity of {size} points in dimension {n}")
    ok = n > 1 and 1 < d <= n and size >= 2
    note = "" if ok else "outside hypotheses: needs n > 1, 1 < d <= n and at least two points"
    log_size = _log2_size(size)
    report.add(
        Bound("poly-count-upper", cube_count_binomial_bound(size, M - 1), "upper", ANCHOR_POLY_SET,
              scale="count"),
        Bound("poly-log-upper", (M - 1) * log_size, "upper", ANCHOR_POLY_SET, hypotheses_hold=ok, note=note),
        Bound("poly-entropy-upper", (2 * E_HIGH * n / d) ** d * log_size, "upper", ANCHOR_POLY_SET,
              hypotheses_hold=ok, note=note),
        Bound("log-lower", 2 * size, "lower", ANCHOR_LOWER, scale="count"),
    )
    if S.is_boolean:
        report.add(Bound("boolean-log-lower", log2_int(size) ** 2 / 16, "lower", ANCHOR_BOOLEAN,
                         note="strict inequality"))
    return report


def poly_capacity(S: PointSet, d: int, exact: bool = True, cap: int = DEFAULT_POINT_CAP,
                  jobs: int = 1) -> CapacityReport:
    """``C_d(S) = C(lift(S))`` with the set bounds attached."""
    report = poly_set_bounds(S, d)
    if exact:
        report.exact_count = count_threshold_functions(monomial_lift(S, d), cap=cap, jobs=jobs)
    return report


@dataclass(frozen=True)
class PolyNetworkBounds:
    hidden_term: Fraction
    output_power: Fraction
    output_entropy: Fraction
    upper: Fraction
    lower: Fraction


def poly_network_terms(n: int, m: int, d: int) -> PolyNetworkBounds:
    if n < 1 or m < 1 or d < 1:
        raise ValueError("need n, m, d >= 1")
    f = math.factorial(d)
    hidden = Fraction(m * n ** (d + 1), f)
    power = Fraction(m ** (d + 1), f)
    entropy = n * (2 * E_HIGH * m / d) ** d
    return PolyNetworkBounds(hidden, power, entropy, hidden + min(power, entropy), hidden)


def poly_network_bounds(n: int, m: int, d: int) -> CapacityReport:
    t = poly_network_terms(n, m, d)
    report = CapacityReport(subject=f"degree-{d} network A({n},{m},1)")
    branch = "m^(d+1)/d!" if t.output_power <= t.output_entropy else "n(2em/d)^d"
    report.add(
        Bound("poly-net-upper", t.upper, "upper", ANCHOR_POLY_NET, note=f"min attained by {branch}"),
        Bound("poly-net-upper-power", t.hidden_term + t.output_power, "upper", ANCHOR_POLY_NET),
        Bound("poly-net-upper-entropy", t.hidden_term + t.output_entropy, "upper", ANCHOR_POLY_NET,
              note="e taken as 2.718282"),
        Bound("poly-net-lower", t.lower, "lower", ANCHOR_POLY_NET, hypotheses_hold=False,
              note="asymptotic: holds up to a (1+o(1)) factor"),
    )
    return report
