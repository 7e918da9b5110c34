"""Exact-arithmetic threshold units, maps and layered networks.

Everything here works on :class:`fractions.Fraction` (or plain ``int``)
coordinates; no floating point is involved in any evaluation.  The
Heaviside rule is ``h(t) = 1`` iff ``t >= 0``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

Vector = tuple[Fraction, ...]

DEFAULT_ENUMERATION_CAP = 20


class DimensionError(ValueError):
    """Raised when vector lengths or layer shapes do not line up."""


class CapExceeded(ValueError):
    """Raised when an exhaustive operation would exceed its configured cap."""

    def __init__(self, name: str, value: int, limit: int):
        super().__init__(f"{name}={value} exceeds limit {limit}")
        self.name = name
        self.value = value
        self.limit = limit


def to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError("floating point values are not accepted; use Fraction or a 'p/q' string")
    return Fraction(value)


def as_vector(values: Iterable) -> Vector:
    return tuple(to_fraction(v) for v in values)


def heaviside(t) -> int:
    return 1 if t >= 0 else 0


@dataclass(frozen=True)
class ThresholdUnit:
    """A single threshold gate ``x -> h(<weights, x> + bias)``."""

    weights: Vector
    bias: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "weights", as_vector(self.weights))
        object.__setattr__(self, "bias", to_fraction(self.bias))

    @property
    def dimension(self) -> int:
        return len(self.weights)

    def preactivation(self, x: Sequence) -> Fraction:
        if len(x) != len(self.weights):
            raise DimensionError(f"unit expects {len(self.weights)} inputs, got {len(x)}")
        total = self.bias
        for a, v in zip(self.weights, x):
            if a and v:
                total += a * v
        return total

    def __call__(self, x: Sequence) -> int:
        return heaviside(self.preactivation(x))


def eval_unit(u: ThresholdUnit, x: Sequence) -> int:
    return u(x)


@dataclass(frozen=True)
class ThresholdMap:
    """A tuple of threshold units sharing one input space."""

    units: tuple[ThresholdUnit, ...]

    def __post_init__(self):
        units = tuple(self.units)
        if not units:
            raise DimensionError("a threshold map needs at least one unit")
        dims = {u.dimension for u in units}
        if len(dims) != 1:
            raise DimensionError(f"units disagree on input dimension: {sorted(dims)}")
        object.__setattr__(self, "units", units)

    @property
    def input_dimension(self) -> int:
        return self.units[0].dimension

    @property
    def output_dimension(self) -> int:
        return len(self.units)

    def __call__(self, x: Sequence) -> tuple[int, ...]:
        return tuple(u(x) for u in self.units)


@dataclass(frozen=True)
class Architecture:
    """Layer sizes ``(n_1, ..., n_L)``, input layer first."""

    sizes: tuple[int, ...]

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        if not sizes:
            raise ValueError("an architecture needs at least one layer")
        if any(s < 1 for s in sizes):
            raise ValueError(f"layer sizes must be positive: {sizes}")
        object.__setattr__(self, "sizes", sizes)

    @classmethod
    def of(cls, *sizes: int) -> "Architecture":
        return cls(tuple(sizes))

    def __len__(self) -> int:
        return len(self.sizes)

    def __iter__(self):
        return iter(self.sizes)

    def __getitem__(self, k):
        return self.sizes[k]

    @property
    def nodes(self) -> int:
        return sum(self.sizes)

    @property
    def connections(self) -> int:
        return sum(a * b for a, b in zip(self.sizes, self.sizes[1:]))

    @property
    def parameters(self) -> int:
        return self.connections + sum(self.sizes[1:])

    def __str__(self) -> str:
        return "A(" + ",".join(map(str, self.sizes)) + ")"


@dataclass(frozen=True)
class LayeredNetwork:
    layers: tuple[ThresholdMap, ...]
    architecture: Architecture = field(default=None)  # derived when omitted

    def __post_init__(self):
        layers = tuple(self.layers)
        if not layers:
            raise DimensionError("a network needs at least one layer of units")
        for k, (lo, hi) in enumerate(zip(layers, layers[1:])):
            if lo.output_dimension != hi.input_dimension:
                raise DimensionError(
                    f"layer {k + 1} emits {lo.output_dimension} values but layer {k + 2} "
                    f"expects {hi.input_dimension}"
                )
        shape = Architecture((layers[0].input_dimension,) + tuple(m.output_dimension for m in layers))
        if self.architecture is None:
            object.__setattr__(self, "architecture", shape)
        elif Architecture(tuple(self.architecture)) != shape:
            raise DimensionError(f"architecture {self.architecture} does not match layer shapes {shape}")
        object.__setattr__(self, "layers", layers)

    @property
    def input_dimension(self) -> int:
        return self.layers[0].input_dimension

    @property
    def output_dimension(self) -> int:
        return self.layers[-1].output_dimension

    def __call__(self, x: Sequence) -> tuple[int, ...]:
        if len(x) != self.input_dimension:
            raise DimensionError(f"network expects {self.input_dimension} inputs, got {len(x)}")
        value = tuple(x)
        for layer in self.layers:
            value = layer(value)
        return value


def eval_network(net: LayeredNetwork, x: Sequence) -> tuple[int, ...]:
    return net(x)


def cube_points(n: int) -> list[tuple[int, ...]]:
    """Vertices of H^n in lexicographic order, first coordinate most significant."""
    return list(itertools.product((0, 1), repeat=n))


@dataclass(frozen=True)
class TruthTable:
    """Values of a map H^n -> H^m, one output tuple per input in lexicographic order."""

    n: int
    m: int
    values: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        values = tuple(tuple(int(b) for b in v) for v in self.values)
        if len(values) != 2 ** self.n:
            raise DimensionError(f"expected {2 ** self.n} entries, got {len(values)}")
        for v in values:
            if len(v) != self.m or any(b not in (0, 1) for b in v):
                raise DimensionError(f"output {v} is not a point of H^{self.m}")
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(cls, n: int, m: int, fn) -> "TruthTable":
        return cls(n, m, tuple(tuple(fn(x)) for x in cube_points(n)))

    def __getitem__(self, x: Sequence[int]) -> tuple[int, ...]:
        index = 0
        for bit in x:
            index = 2 * index + int(bit)
        return self.values[index]

    def items(self):
        return zip(cube_points(self.n), self.values)


def truth_table(net: LayeredNetwork, cap: int = DEFAULT_ENUMERATION_CAP) -> TruthTable:
    n = net.input_dimension
    if n > cap:
        raise CapExceeded("input_dimension", n, cap)
    return TruthTable(n, net.output_dimension, tuple(net(x) for x in cube_points(n)))


@dataclass(frozen=True)
class PointSet:
    """Ordered finite set of distinct rational points in R^n."""

    points: tuple[Vector, ...]
    dimension: int = None  # inferred from the points when omitted

    def __post_init__(self):
        points = tuple(as_vector(p) for p in self.points)
        dim = self.dimension
        if dim is None:
            if not points:
                raise DimensionError("cannot infer the dimension of an empty point set")
            dim = len(points[0])
        if dim < 1:
            raise DimensionError("dimension must be positive")
        for p in points:
            if len(p) != dim:
                raise DimensionError(f"point {p} does not have dimension {dim}")
        if len(set(points)) != len(points):
            raise ValueError("points must be distinct")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "dimension", dim)

    @classmethod
    def cube(cls, n: int) -> "PointSet":
        return cls(tuple(cube_points(n)), n)

    @property
    def is_boolean(self) -> bool:
        return all(c in (0, 1) for p in self.points for c in p)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __getitem__(self, i):
        return self.points[i]

    def subset(self, indices: Iterable[int]) -> "PointSet":
        return PointSet(tuple(self.points[i] for i in indices), self.dimension)

    def map(self, fn) -> "PointSet":
        return PointSet(tuple(as_vector(fn(p)) for p in self.points))


@dataclass(frozen=True)
class Dichotomy:
    labels: tuple[int, ...]

    def __post_init__(self):
        labels = tuple(int(b) for b in self.labels)
        if any(b not in (0, 1) for b in labels):
            raise ValueError("labels must be bits")
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_mask(cls, mask: int, size: int) -> "Dichotomy":
        return cls(tuple((mask >> i) & 1 for i in range(size)))

    @property
    def mask(self) -> int:
        return sum(b << i for i, b in enumerate(self.labels))

    def complement(self) -> "Dichotomy":
        return Dichotomy(tuple(1 - b for b in self.labels))

    def __len__(self) -> int:
        return len(self.labels)


def direct_sum(A: PointSet, B: PointSet | Sequence) -> PointSet:
    """All concatenations ``a + b``; ``B`` may also be a single vector."""
    if not isinstance(B, PointSet):
        vec = as_vector(B)
        return PointSet(tuple(a + vec for a in A.points), A.dimension + len(vec))
    return PointSet(tuple(a + b for a in A.points for b in B.points), A.dimension + B.dimension)
