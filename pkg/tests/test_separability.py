import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from threshcap.core import Dichotomy, DimensionError, PointSet, cube_points
from threshcap.separability import (
    NotSeparable,
    bounded_weight_functions,
    check_witness,
    complement_closed,
    is_separable,
    separable,
    strictly_feasible,
)

H2 = PointSet.cube(2)
AND = (0, 0, 0, 1)
XOR = (0, 1, 1, 0)


def test_and_witness():
    w = is_separable(H2, AND)
    assert w.unit.weights == (2, 2) and w.unit.bias == -3
    assert [w.unit(x) for x in H2] == list(AND)


def test_xor_not_separable():
    with pytest.raises(NotSeparable):
        is_separable(H2, XOR)


def test_xor_absent_from_bounded_integer_search():
    # |a_i| <= 4 and |2 alpha| <= 4 covers every threshold function on H^2
    found = set()
    for a1, a2, b2 in itertools.product(range(-4, 5), repeat=3):
        found.add(tuple(1 if a1 * x + a2 * y + Fraction(b2, 2) >= 0 else 0 for x, y in cube_points(2)))
    assert XOR not in found and (0, 1, 1, 0)[::-1] not in found
    assert len(found) == 14


def test_single_point_both_labels():
    S = PointSet(((Fraction(1, 3), 2),))
    assert separable(S, (0,)) and separable(S, (1,))


def test_label_count_mismatch():
    with pytest.raises(DimensionError):
        is_separable(H2, (1, 0))


def test_complement_examples():
    assert complement_closed(H2, AND) and separable(H2, (1, 1, 1, 0))
    assert complement_closed(H2, XOR) and not separable(H2, (1, 0, 0, 1))


def test_strictly_feasible_infeasible_pair():
    assert strictly_feasible([(1, 0), (-1, 0)]) is None
    z = strictly_feasible([(1, 2), (3, -1)])
    assert all(sum(a * b for a, b in zip(r, z)) >= 1 for r in [(1, 2), (3, -1)])


def random_subset(rng, n, k):
    cube = PointSet.cube(n)
    return cube.subset(sorted(rng.sample(range(2 ** n), k)))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_random_six_point_subset_complement_symmetry(seed):
    rng = random.Random(seed)
    S = random_subset(rng, 3, 6)
    y = tuple(rng.randint(0, 1) for _ in range(6))
    assert complement_closed(S, y)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_witness_margins_and_oracle_agreement(seed):
    rng = random.Random(seed)
    S = random_subset(rng, 3, rng.randint(1, 8))
    oracle = bounded_weight_functions(S, 3)
    for mask in range(2 ** len(S)):
        y = Dichotomy.from_mask(mask, len(S))
        try:
            w = is_separable(S, y)
        except NotSeparable:
            assert mask not in oracle
            continue
        check_witness(w, S.points, y.labels)
        assert mask in oracle


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_affine_invariance(seed):
    rng = random.Random(seed)
    S = random_subset(rng, 3, 6)
    while True:
        M = [[Fraction(rng.randint(-3, 3)) for _ in range(3)] for _ in range(3)]
        det = (M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1])
               - M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0])
               + M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]))
        if det:
            break
    shift = [Fraction(rng.randint(-5, 5), 2) for _ in range(3)]
    T = S.map(lambda x: tuple(sum(M[i][j] * x[j] for j in range(3)) + shift[i] for i in range(3)))
    for mask in range(2 ** 6):
        y = Dichotomy.from_mask(mask, 6)
        assert separable(S, y) == separable(T, y)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_monotone_restriction(seed):
    rng = random.Random(seed)
    S = random_subset(rng, 4, 9)
    y = tuple(rng.randint(0, 1) for _ in range(9))
    if not separable(S, y):
        return
    keep = sorted(rng.sample(range(9), rng.randint(1, 8)))
    assert separable(S.subset(keep), tuple(y[i] for i in keep))


def test_non_boolean_points():
    # three collinear points: the middle one cannot differ from both ends
    S = PointSet(((0,), (Fraction(1, 2),), (1,)))
    assert separable(S, (0, 1, 1)) and not separable(S, (1, 0, 1))
