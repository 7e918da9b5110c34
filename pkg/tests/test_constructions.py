import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from threshcap.core import (
    CapExceeded,
    Dichotomy,
    DimensionError,
    LayeredNetwork,
    PointSet,
    ThresholdMap,
    ThresholdUnit,
    cube_points,
    truth_table,
)
from threshcap.constructions import (
    MultiplexPlan,
    add_clause,
    balance_parameters,
    binary_code,
    constant_unit,
    enrichment_map,
    equality_indicator,
    exponential_map,
    image_points,
    logic_unit,
    multiplex,
    network_from_units,
    stack,
    verify_equivalence,
)
from threshcap.separability import is_separable
from threshcap.setcap import count_threshold_functions, threshold_functions

AND2 = logic_unit("AND", 2)
OR2 = logic_unit("OR", 2)


def test_equality_indicator_example():
    u = equality_indicator((1, 0))
    assert u.weights == (1, -1) and u.bias == Fraction(-1, 2)
    assert [u(x) for x in cube_points(2)] == [0, 0, 1, 0]


def test_equality_indicator_all_ones_is_and():
    u = equality_indicator((1, 1, 1))
    assert [u(x) for x in cube_points(3)] == [logic_unit("AND", 3)(x) for x in cube_points(3)]


@pytest.mark.parametrize("q", range(1, 6))
def test_equality_indicator_grid(q):
    for theta in cube_points(q):
        u = equality_indicator(theta)
        assert all(u(x) == (x == theta) for x in cube_points(q))


def test_equality_indicator_rejects_non_boolean():
    with pytest.raises(ValueError):
        equality_indicator((1, 2))


def test_logic_units():
    OR3 = logic_unit("OR", 3)
    assert OR3((0, 0, 0)) == 0 and OR3((0, 1, 0)) == 1
    assert logic_unit("NOT")((1,)) == 0 and logic_unit("NOT")((0,)) == 1
    ident = logic_unit("IDENTITY")
    assert [ident((b,)) for b in (0, 1)] == [0, 1]
    for m in range(1, 7):
        for x in cube_points(m):
            assert logic_unit("AND", m)(x) == int(all(x))
            assert logic_unit("OR", m)(x) == int(any(x))


def test_add_clause_and_with_bit():
    g = add_clause(AND2, (1,))
    assert [p for p in cube_points(3) if g(p)] == [(1, 1, 1)]


def test_add_clause_constant_one():
    g = add_clause(ThresholdUnit((0, 0), 0), (0, 1))
    assert all(g(p) == (p[2:] == (0, 1)) for p in cube_points(4))


def test_add_clause_constant_zero():
    g = add_clause(constant_unit(0, 2), (1,))
    assert not any(g(p) for p in cube_points(3))


def random_unit(rng, n):
    return ThresholdUnit(tuple(Fraction(rng.randint(-7, 7), rng.randint(1, 4)) for _ in range(n)),
                         Fraction(rng.randint(-9, 9), rng.randint(1, 4)))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_add_clause_random(seed):
    rng = random.Random(seed)
    u = random_unit(rng, 3)
    theta = tuple(rng.randint(0, 1) for _ in range(2))
    g = add_clause(u, theta)
    for x in cube_points(3):
        for y in cube_points(2):
            assert g(x + y) == int(u(x) == 1 and y == theta)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_add_clause_margins(seed):
    rng = random.Random(seed)
    u = random_unit(rng, 3)
    theta = tuple(rng.randint(0, 1) for _ in range(2))
    g = add_clause(u, theta)
    values = [u.preactivation(x) for x in cube_points(3)]
    if not any(t >= 0 for t in values) or all(t >= 0 for t in values):
        return
    # at y = theta the equality part contributes exactly 1/2, leaving K(t - b)
    for x, t in zip(cube_points(3), values):
        inner = g.preactivation(x + theta) - Fraction(1, 2)
        if t >= 0:
            assert -Fraction(1, 2) <= inner <= 0
        else:
            assert inner < -Fraction(1, 2)


def test_add_clause_on_custom_domain():
    S = PointSet(((0,), (Fraction(1, 2),), (3,)))
    u = ThresholdUnit((1,), Fraction(-1))
    g = add_clause(u, (0, 1), S)
    for x in S:
        for y in cube_points(2):
            assert g(x + y) == int(u(x) == 1 and y == (0, 1))


def test_exponential_map_examples():
    f = exponential_map(2)
    assert f((0, 1)) == (0, 0, 1, 0)
    assert f((1, 1)) == (1, 0, 0, 0)
    assert f((0, 0)) == (0, 0, 0, 1)


@pytest.mark.parametrize("k", range(1, 5))
def test_exponential_map_is_one_hot_bijection(k):
    f = exponential_map(k)
    images = [f(x) for x in cube_points(k)]
    assert len(set(images)) == 2 ** k
    assert all(sum(v) == 1 for v in images)
    for x in cube_points(k):
        value = int("".join(map(str, x)), 2)
        # the image read as a big-endian numeral is 2^value
        assert int("".join(map(str, f(x))), 2) == 2 ** value


def test_exponential_map_cap():
    with pytest.raises(CapExceeded):
        exponential_map(6, cap=5)


def test_balance_examples():
    p = balance_parameters(16, 64)
    assert (p.k, p.n0, p.m0) == (2, 16, 32)
    assert p.n0 * 4 == p.m0 * 2
    p = balance_parameters(8, 32)
    assert (p.k, p.n0, p.m0) == (2, 8, 16)
    with pytest.raises(ValueError):
        balance_parameters(8, 20)


def test_balance_grid():
    checked = 0
    for n in range(4, 29):
        m = 4 * n
        while m * m <= 16 * 2 ** n and m <= 5000:
            p = balance_parameters(n, m)
            p.check()
            assert p.n0 * 2 ** p.k == p.m0 * p.k
            assert n <= 2 * p.n0 <= 2 * n and m <= 8 * p.m0 and 2 * p.m0 <= m
            # k is the integer part of the root of 2^x / x = m / (2n)
            assert 2 ** p.k * 2 * n <= m * p.k
            assert p.k == n // 2 or 2 ** (p.k + 1) * 2 * n > m * (p.k + 1)
            assert p.k <= p.x + Fraction(1, 2 ** 20) < p.k + 1
            checked += 1
            m += 3
    assert checked > 300


def test_enrichment_examples():
    r = enrichment_map(4, 8)
    assert r.case == "balanced" and r.k == 2 and r.verified
    image = image_points(r, 4)
    assert len(image) == 16 and image.dimension == 8
    r = enrichment_map(3, 3)
    assert r.case == "identity"
    assert count_threshold_functions(image_points(r, 3)) == count_threshold_functions(PointSet.cube(3))
    assert enrichment_map(12, 64).case == "general"
    with pytest.raises(ValueError):
        enrichment_map(4, 100)


def test_enrichment_injective_up_to_eight():
    cases = 0
    for n in range(1, 9):
        for m in range(n, 4 * n + 40):
            try:
                r = enrichment_map(n, m)
            except ValueError:
                continue
            assert r.verified
            assert len({r.map(x) for x in cube_points(n)}) == 2 ** n
            assert r.map.output_dimension == m
            cases += 1
    assert cases > 100


def test_multiplex_and_or():
    net = multiplex([AND2, OR2])
    assert net.architecture.sizes == (3, 2, 1)
    for x in cube_points(2):
        assert net(x + (0,)) == (AND2(x),)
        assert net(x + (1,)) == (OR2(x),)


def test_multiplex_single_function():
    net = multiplex([AND2])
    assert net.architecture.sizes == (2, 1, 1)
    assert all(net(x) == (AND2(x),) for x in cube_points(2))


def test_multiplex_unused_codes_output_zero():
    net = multiplex([AND2, OR2, AND2])
    assert MultiplexPlan.of(3).codes == ((0, 0), (0, 1), (1, 0))
    assert all(net(x + (1, 1)) == (0,) for x in cube_points(2))


def units_on_square():
    S = PointSet.cube(2)
    return [is_separable(S, Dichotomy.from_mask(mask, 4)).unit for mask in threshold_functions(S)]


def test_multiplex_injective_on_all_pairs():
    units = units_on_square()
    assert len(units) == 14
    tables = {truth_table(multiplex([f, g])).values for f, g in itertools.product(units, repeat=2)}
    assert len(tables) == 196


def module(unit):
    ident = logic_unit("IDENTITY")
    return network_from_units([[unit], [ident], [ident]])


def test_stack_two_modules():
    mods = [module(AND2), module(OR2)]
    net, plan = stack(mods)
    assert plan.codes == ((0,), (1,))
    for x in cube_points(2):
        assert net(x + (0,)) == (AND2(x),)
        assert net(x + (1,)) == (OR2(x),)


def test_stack_constant_zero_modules():
    zero = module(constant_unit(0, 2))
    net, _ = stack([zero, zero, zero])
    assert not any(v[0] for v in truth_table(net).values)


def test_stack_with_target_and_width_budget():
    ident = logic_unit("IDENTITY")
    first = network_from_units([[AND2, OR2], [ThresholdUnit((0, 1), Fraction(-1, 2))], [ident]])
    mods = [first, module(AND2)]
    net, plan = stack(mods, target=(2, 2, 1, 1, 1))
    assert len(net.architecture) == 6
    assert all(w <= b for w, b in zip(plan.widths, plan.width_budget))
    for x in cube_points(2):
        assert net(x + (0,)) == (OR2(x),) and net(x + (1,)) == (AND2(x),)
    with pytest.raises(DimensionError):
        stack(mods, target=(2, 1, 1, 1, 1))


def test_stack_distinct_modules_give_distinct_tables():
    units = units_on_square()[:6]
    tables = set()
    for f, g in itertools.product(units, repeat=2):
        net, _ = stack([module(f), module(g)])
        tables.add(truth_table(net).values)
    assert len(tables) == 36


def test_stack_rejects_bad_shape():
    with pytest.raises(DimensionError):
        stack([network_from_units([[AND2]])])


def identity_net(n):
    return network_from_units([[ThresholdUnit(tuple(int(i == j) for j in range(n)), Fraction(-1, 2)) for i in range(n)]])


def test_verify_equivalence():
    assert verify_equivalence(identity_net(3), truth_table(identity_net(3))) == (True, None)
    net = multiplex([AND2, OR2])
    assert verify_equivalence(net, truth_table(net))[0]
    # mutant: raise the output bias by 1 so the OR unit fires everywhere
    hidden, out = net.layers
    u = out.units[0]
    mutant = LayeredNetwork((hidden, ThresholdMap((ThresholdUnit(u.weights, u.bias + 1),))))
    ok, witness = verify_equivalence(mutant, truth_table(net))
    assert not ok and witness is not None
    assert mutant(witness) != net(witness)


def test_binary_code():
    assert binary_code(2, 3) == (0, 1, 0)
    with pytest.raises(ValueError):
        binary_code(4, 2)
