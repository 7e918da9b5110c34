"""Capacity reports: an exact count (when known) plus labelled bounds."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any


def log2_int(n: int) -> float:
    """Binary logarithm of a positive big integer without float overflow."""
    if n <= 0:
        raise ValueError("log2 of a non-positive count")
    shift = max(n.bit_length() - 64, 0)
    return math.log2(n >> shift) + shift


@dataclass(frozen=True)
class Bound:
    """One bound on a capacity.

    ``value`` is in bits unless ``scale == "count"``, in which case it bounds
    the number of functions.  ``hypotheses_hold`` is False when the source
    result's assumptions are not met; such bounds are still reported.
    """

    name: str
    value: Any
    kind: str  # "lower" or "upper"
    anchor: str
    scale: str = "bits"
    hypotheses_hold: bool = True
    note: str = ""

    def __post_init__(self):
        if self.kind not in ("lower", "upper"):
            raise ValueError(f"bad bound kind {self.kind!r}")
        if self.scale not in ("bits", "count"):
            raise ValueError(f"bad bound scale {self.scale!r}")

    def holds_for_count(self, count: int) -> bool:
        """Check this bound against an exact count; integer comparisons where possible."""
        if self.scale == "count":
            return count >= self.value if self.kind == "lower" else count <= self.value
        value = self.value
        if isinstance(value, (int, Fraction)):
            # compare log2(count) with a rational value exactly: 2^v <=> count
            return _log_compare(count, Fraction(value), self.kind)
        bits = log2_int(count)
        slack = 1e-9
        return bits >= value - slack if self.kind == "lower" else bits <= value + slack


def _log_compare(count: int, value: Fraction, kind: str) -> bool:
    # log2(count) >= value  <=>  count^q >= 2^p  for value = p/q, q > 0
    p, q = value.numerator, value.denominator
    gap = log2_int(count) - float(value) if count > 0 else -math.inf
    if abs(gap) > 1e-6 * max(1.0, abs(float(value))):
        # far apart: the float comparison is already decisive
        return gap >= 0 if kind == "lower" else gap <= 0
    if kind == "lower":
        if p <= 0:
            return True
        return count ** q >= 2 ** p
    if p < 0:
        return False
    return count ** q <= 2 ** p


@dataclass
class CapacityReport:
    subject: str
    exact_count: int | None = None
    bounds: list[Bound] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def log2_exact(self) -> float | None:
        return None if self.exact_count is None else log2_int(self.exact_count)

    def add(self, *bounds: Bound) -> "CapacityReport":
        self.bounds.extend(bounds)
        return self

    def lower_bounds(self) -> list[Bound]:
        return [b for b in self.bounds if b.kind == "lower"]

    def upper_bounds(self) -> list[Bound]:
        return [b for b in self.bounds if b.kind == "upper"]

    def violations(self, only_valid: bool = True) -> list[Bound]:
        """Bounds contradicted by the exact count (empty when no count is known)."""
        if self.exact_count is None:
            return []
        return [
            b
            for b in self.bounds
            if (b.hypotheses_hold or not only_valid) and not b.holds_for_count(self.exact_count)
        ]
