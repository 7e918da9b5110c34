"""Exact linear separability of dichotomies of finite point sets.

A dichotomy ``y`` of ``S`` is realizable by ``h(<a,x> + alpha)`` iff the
strict-margin system

    <a,x> + alpha >= 1   (y(x) = 1)
    <a,x> + alpha <= -1  (y(x) = 0)

is feasible.  Feasibility of ``A z >= 1`` is decided through its Gordan
alternative: it is infeasible iff some ``y >= 0`` with ``sum(y) = 1`` has
``A^T y = 0``.  That alternative is a standard-form phase-1 problem, solved
here by a fraction-free integer simplex with Bland's rule.  When phase 1
ends with a positive optimum, its simplex multipliers give ``z`` directly.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import Dichotomy, DimensionError, PointSet, ThresholdUnit, Vector


class NotSeparable(Exception):
    """The dichotomy cannot be realized by a single threshold unit."""


def _integer_row(row: Sequence[Fraction]) -> list[int]:
    den = 1
    for v in row:
        den = den * v.denominator // math.gcd(den, v.denominator)
    ints = [int(v * den) for v in row]
    g = 0
    for v in ints:
        g = math.gcd(g, v)
    return [v // g for v in ints] if g > 1 else ints


def _reduce(row: list[int]) -> list[int]:
    g = 0
    for v in row:
        if v:
            g = math.gcd(g, v)
            if g == 1:
                return row
    if g > 1:
        return [v // g for v in row]
    return row


def feasible_direction(rows: Sequence[Sequence[int]]) -> list[int] | None:
    """Integer ``z`` with ``<r, z> > 0`` for every integer row ``r``, or ``None``.

    Core of the exact solver; rows must be integer vectors of one length.
    """
    if not rows:
        return []
    dim = len(rows[0])
    m = len(rows)

    # Phase-1 tableau for: sum_i y_i r_i = 0, sum_i y_i = 1, y >= 0.
    # Columns 0..m-1 are y, columns m..m+dim are artificials, last is rhs.
    n_rows = dim + 1
    n_cols = m + n_rows
    tab = []
    for j in range(dim):
        row = [r[j] for r in rows] + [0] * (n_rows + 1)
        row[m + j] = 1
        tab.append(row)
    row = [1] * m + [0] * (n_rows + 1)
    row[m + dim] = 1
    row[n_cols] = 1
    tab.append(row)
    basis = [m + j for j in range(n_rows)]
    obj = [0] * (n_cols + 1)
    for i in range(m):
        obj[i] = -sum(tab[j][i] for j in range(n_rows))
    obj[n_cols] = -1
    # obj holds (scale_num / scale_den) * (true reduced-cost row)
    scale_num, scale_den = 1, 1

    while True:
        enter = -1
        for j in range(n_cols):
            if obj[j] < 0:
                enter = j
                break
        if enter < 0:
            break
        leave = -1
        for r in range(n_rows):
            coef = tab[r][enter]
            if coef <= 0:
                continue
            if leave < 0:
                leave = r
                continue
            lhs = tab[r][n_cols] * tab[leave][enter]
            rhs = tab[leave][n_cols] * coef
            if lhs < rhs or (lhs == rhs and basis[r] < basis[leave]):
                leave = r
        if leave < 0:  # phase 1 is bounded below by 0
            raise RuntimeError("phase-1 simplex reported an unbounded direction")
        prow = tab[leave]
        piv = prow[enter]
        nz = [j for j, v in enumerate(prow) if v]
        for r in range(n_rows):
            if r == leave:
                continue
            row = tab[r]
            f = row[enter]
            if f == 0:
                continue
            new = [v * piv for v in row]
            for j in nz:
                new[j] -= f * prow[j]
            tab[r] = _reduce(new)
        f = obj[enter]
        new = [v * piv for v in obj]
        for j in nz:
            new[j] -= f * prow[j]
        scale_num *= piv
        g = 0
        for v in new:
            if v:
                g = math.gcd(g, v)
        if g > 1:
            new = [v // g for v in new]
            scale_den *= g
        g = math.gcd(scale_num, scale_den)
        if g > 1:
            scale_num //= g
            scale_den //= g
        obj = new
        basis[leave] = enter

    if obj[n_cols] == 0:
        return None
    # Multipliers pi_j = 1 - obj_j / scale on the artificial columns; the
    # separating direction is -pi[:dim] / pi[dim], here up to a positive factor.
    z = [obj[m + j] * scale_den - scale_num for j in range(dim)]
    for r in rows:
        if sum(a * b for a, b in zip(r, z)) <= 0:
            raise AssertionError("simplex produced an invalid separating direction")
    return z


def strictly_feasible(rows: Sequence[Sequence]) -> tuple[Fraction, ...] | None:
    """Return ``z`` with ``<r, z> >= 1`` for every row ``r``, or ``None``.

    All rows must have the same length.  Exact; never uses floating point.
    """
    rows = [tuple(Fraction(v) for v in r) for r in rows]
    if not rows:
        return ()
    dim = len(rows[0])
    if any(len(r) != dim for r in rows):
        raise DimensionError("rows must share one length")
    z = feasible_direction([_integer_row(r) for r in rows])
    if z is None:
        return None
    worst = min(sum(a * b for a, b in zip(r, z)) for r in rows)
    return tuple(Fraction(v) / worst for v in z)


@dataclass(frozen=True)
class SeparationWitness:
    unit: ThresholdUnit
    margins: tuple[Fraction, ...]


def _signed_rows(points: Sequence[Vector], labels: Sequence[int]) -> list[tuple]:
    rows = []
    for x, b in zip(points, labels):
        row = tuple(x) + (Fraction(1),)
        rows.append(row if b else tuple(-v for v in row))
    return rows


def normalize_witness(z: Sequence[Fraction], points: Sequence[Vector], labels: Sequence[int]) -> SeparationWitness:
    """Scale ``(a, alpha)`` to integers with gcd 1, enlarging only if a margin drops below 1."""
    ints = _integer_row([Fraction(v) for v in z])
    margins = [sum((Fraction(a) * c for a, c in zip(ints, x)), Fraction(ints[-1])) for x in points]
    signed = [mg if b else -mg for mg, b in zip(margins, labels)]
    worst = min(signed) if signed else Fraction(1)
    if worst <= 0:
        raise AssertionError("witness does not separate the dichotomy")
    if worst < 1:
        k = math.ceil(1 / worst)
        ints = [k * v for v in ints]
        margins = [k * mg for mg in margins]
    unit = ThresholdUnit(tuple(ints[:-1]), ints[-1])
    witness = SeparationWitness(unit, tuple(margins))
    check_witness(witness, points, labels)
    return witness


def check_witness(w: SeparationWitness, points: Sequence[Vector], labels: Sequence[int]) -> None:
    for x, b, mg in zip(points, labels, w.margins):
        if w.unit.preactivation(x) != mg:
            raise AssertionError("stored margin disagrees with the unit")
        if (b and mg < 1) or (not b and mg > -1):
            raise AssertionError(f"margin {mg} violates the strict-margin invariant at {x}")


def is_separable(S: PointSet, y: Dichotomy | Sequence[int]) -> SeparationWitness:
    """Return a verified strict-margin witness, or raise :class:`NotSeparable`."""
    labels = y.labels if isinstance(y, Dichotomy) else tuple(int(b) for b in y)
    if len(labels) != len(S):
        raise DimensionError(f"{len(labels)} labels for {len(S)} points")
    if not S.points:
        return SeparationWitness(ThresholdUnit((0,) * S.dimension, 0), ())
    z = strictly_feasible(_signed_rows(S.points, labels))
    if z is None:
        raise NotSeparable(labels)
    return normalize_witness(z, S.points, labels)


def separable(S: PointSet, y) -> bool:
    try:
        is_separable(S, y)
    except NotSeparable:
        return False
    return True


def complement_closed(S: PointSet, y: Dichotomy | Sequence[int]) -> bool:
    """True when ``y`` and its complement are both separable or both not."""
    labels = y.labels if isinstance(y, Dichotomy) else tuple(y)
    flipped = tuple(1 - b for b in labels)
    return separable(S, labels) == separable(S, flipped)


def bounded_weight_functions(S: PointSet, bound: int) -> set[int]:
    """Labelings of ``S`` realized by integer weights in ``[-bound, bound]``.

    Independent of the simplex: for each weight vector every bias yields an
    upper set of the sorted projections, so all of them are listed directly.
    Labelings are bit masks, bit ``i`` for point ``i``.  Sound for any ``S``;
    complete for small Boolean cubes once ``bound`` reaches the maximal
    integer weight needed there.
    """
    masks = {0}
    pts = S.points
    for a in itertools.product(range(-bound, bound + 1), repeat=S.dimension):
        proj = [sum((ai * c for ai, c in zip(a, x)), Fraction(0)) for x in pts]
        for level in set(proj):
            masks.add(sum(1 << i for i, t in enumerate(proj) if t >= level))
    return masks
