"""Extremal architectures for the estimated capacity, plus region-count bounds.

All objectives here are the estimated capacity Ĉ (see
:func:`threshcap.netcap.estimated_capacity`), computed in exact integers.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .core import Architecture, CapExceeded
from .setcap import region_count

COMPOSITION_GUARD = 30
RANKING_GUARD = 18


def c_hat(sizes: Sequence[int]) -> int:
    total, running = 0, sizes[0]
    for a, b in zip(sizes, sizes[1:]):
        running = min(running, a)
        total += running * a * b
    return total


@dataclass(frozen=True)
class Extremum:
    arch: Architecture
    value: int
    ranking: tuple[tuple[tuple[int, ...], int], ...] | None = None


def optimal_architecture_nodes(N: int) -> Extremum:
    """Best two-layer split ``(n, N - n)``, the integer version of ``(2N/3, N/3)``."""
    if N < 2:
        raise ValueError("need N >= 2")
    # ties go to the larger first layer, matching the brute-force ordering
    n = max(range(1, N), key=lambda n: (n * n * (N - n), n))
    return Extremum(Architecture((n, N - n)), n * n * (N - n))


def optimal_architecture_nodes_input(N: int, n1: int) -> Extremum:
    """Best architecture with ``N`` nodes and input size ``n1``.

    For ``n1 <= N/2`` the target is ``(n1, N/2, N/2 - n1)``; integer
    neighbours of the second layer are tried and the best kept.  Otherwise
    the answer is ``(n1, N - n1)``.
    """
    if not 1 <= n1 < N:
        raise ValueError("need 1 <= n1 < N")
    if 2 * n1 > N:
        return Extremum(Architecture((n1, N - n1)), c_hat((n1, N - n1)))
    candidates = []
    for second in {N // 2, (N + 1) // 2}:
        third = N - n1 - second
        if second < 1 or third < 0:
            continue
        sizes = (n1, second) if third == 0 else (n1, second, third)
        candidates.append(sizes)
    best = max(candidates, key=lambda s: (c_hat(s), -len(s), s))
    return Extremum(Architecture(best), c_hat(best))


def closed_form_max_nodes(N: int) -> Fraction:
    """``Ĉ(2N/3, N/3) = 4N³/27``."""
    return Fraction(4 * N ** 3, 27)


def small_input_bound(N: int, n1: int) -> Fraction:
    return Fraction(n1 * N * N, 4)


def large_input_bound(N: int, n1: int) -> int:
    return n1 * n1 * (N - n1)


def minimal_architecture(n1: int, nodes: int | None = None, connections: int | None = None) -> Architecture:
    """Deepest single-output architecture ``(n1, 1, ..., 1)`` within the budget.

    ``nodes`` counts every layer including the output; ``connections`` is W.
    """
    if (nodes is None) == (connections is None):
        raise ValueError("give exactly one of nodes or connections")
    if n1 < 1:
        raise ValueError("n1 must be positive")
    if nodes is not None:
        ones = nodes - n1
    else:
        # W(n1, 1 x j) = n1 + (j - 1)
        ones = connections - n1 + 1
    if ones < 1:
        raise ValueError("budget leaves no room for an output unit")
    return Architecture((n1,) + (1,) * ones)


def _compositions(total: int):
    """Ordered compositions of ``total`` into positive parts."""
    if total == 0:
        yield ()
        return
    for cut in itertools.product((0, 1), repeat=total - 1):
        parts, run = [], 1
        for c in cut:
            if c:
                parts.append(run)
                run = 1
            else:
                run += 1
        parts.append(run)
        yield tuple(parts)


def _rank_key(sizes: tuple[int, ...], value: int, objective: str):
    # better first: extreme value, then fewer layers, then lexicographically largest
    return (value if objective == "max" else -value, -len(sizes), sizes)


@lru_cache(maxsize=None)
def _best_suffix(rem: int, running: int, last: int, objective: str):
    """Best continuation after a prefix ending in ``last`` with bottleneck ``running``."""
    if rem == 0:
        return (0, ())
    best = None
    for s in range(1, rem + 1):
        value, tail = _best_suffix(rem - s, min(running, s), s, objective)
        value += running * last * s
        suffix = (s,) + tail
        key = (value if objective == "max" else -value, -len(suffix), suffix)
        if best is None or key > best[0]:
            best = (key, value, suffix)
    return (best[1], best[2])


def brute_force_extremal(N: int, fixed_n1: int | None = None, objective: str = "max",
                         single_output: bool = False, ranking: bool | None = None) -> Extremum:
    """Extremum of Ĉ over all compositions of ``N`` into at least two layers.

    The optimum comes from an exact dynamic program over (remaining nodes,
    bottleneck, last layer); it is equivalent to listing every composition
    with the same tie-break.  A full ranking is produced by explicit
    enumeration when ``N`` is small enough.
    """
    if objective not in ("max", "min"):
        raise ValueError("objective must be 'max' or 'min'")
    if N > COMPOSITION_GUARD:
        raise CapExceeded("N", N, COMPOSITION_GUARD)
    if ranking is None:
        ranking = N <= RANKING_GUARD and not single_output
    if ranking or single_output:
        if N > RANKING_GUARD:
            raise CapExceeded("N", N, RANKING_GUARD)
        rows = []
        for sizes in _compositions(N):
            if len(sizes) < 2 or (fixed_n1 is not None and sizes[0] != fixed_n1):
                continue
            if single_output and sizes[-1] != 1:
                continue
            rows.append((sizes, c_hat(sizes)))
        if not rows:
            raise ValueError("no composition satisfies the constraints")
        rows.sort(key=lambda r: _rank_key(r[0], r[1], objective), reverse=True)
        return Extremum(Architecture(rows[0][0]), rows[0][1], tuple(rows) if ranking else None)
    firsts = [fixed_n1] if fixed_n1 is not None else range(1, N)
    best = None
    for n1 in firsts:
        if not 1 <= n1 < N:
            continue
        value, tail = _best_suffix(N - n1, n1, n1, objective)
        sizes = (n1,) + tail
        key = _rank_key(sizes, value, objective)
        if best is None or key > best[0]:
            best = (key, sizes, value)
    if best is None:
        raise ValueError("no composition satisfies the constraints")
    return Extremum(Architecture(best[1]), best[2])


def move_nodes_rewrite(arch: Architecture | Sequence[int]) -> Architecture:
    """``(n1, n2, n3, ..., nL) -> (n1 + n3 + ... + nL, n2)``, which never lowers Ĉ."""
    sizes = tuple(arch)
    if len(sizes) < 3:
        raise ValueError("need at least three layers")
    out = (sizes[0] + sum(sizes[2:]), sizes[1])
    assert c_hat(out) >= c_hat(sizes)
    return Architecture(out)


@dataclass(frozen=True)
class RegionBound:
    regions: int
    assignment_bound: int


def shallow_region_bound(n: int, m: int) -> RegionBound:
    """Regions cut by ``m`` affine hyperplanes in ``R^n`` and the output-assignment count bound."""
    if n < 1 or m < 0:
        raise ValueError("need n >= 1 and m >= 0")
    regions = region_count(m, n, affine=True)
    return RegionBound(regions, 2 * sum(math.comb(regions - 1, k) for k in range(m + 1)))


@dataclass(frozen=True)
class QuadraticGap:
    lhs: Fraction
    rhs: Fraction


def quadratic_form_gap(x: Sequence) -> QuadraticGap:
    """``(sum x)^2`` against ``4 sum x_k x_{k+1}``."""
    xs = [Fraction(v) for v in x]
    if any(v <= 0 for v in xs):
        raise ValueError("entries must be positive")
    lhs = sum(xs, Fraction(0)) ** 2
    rhs = 4 * sum((a * b for a, b in zip(xs, xs[1:])), Fraction(0))
    assert lhs >= rhs
    return QuadraticGap(lhs, rhs)
