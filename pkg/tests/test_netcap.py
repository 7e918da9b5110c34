import itertools

import pytest

from threshcap.core import Architecture, PointSet
from threshcap.netcap import (
    UNLIMITED,
    Budget,
    BudgetExceeded,
    BoundUnavailable,
    enumerate_network_functions,
    estimated_capacity,
    exact_network_capacity,
    multiplexing_lower_bound,
    naive_network_functions,
    network_lower_bounds,
    network_upper_bounds,
    restricted_capacity_bounds,
    to_truth_table,
)
from threshcap.setcap import count_threshold_functions

from oracles import compositions


def count(sizes, S=None, budget=UNLIMITED):
    return len(enumerate_network_functions(Architecture(tuple(sizes)), S, budget))


def bound(report, name):
    return next(b for b in report.bounds if b.name == name)


def test_single_layer_counts():
    assert count((2, 1)) == 14
    assert count((1, 1)) == 4
    assert count((2, 2)) == 196


def test_exact_capacity_report():
    r = exact_network_capacity(Architecture.of(2, 1))
    assert r.exact_count == 14
    assert r.log2_exact == pytest.approx(3.807, abs=1e-3)
    assert not r.violations()


@pytest.mark.parametrize("sizes", [(1, 1), (2, 1), (2, 2), (1, 1, 1), (2, 1, 1), (2, 2, 1), (1, 2, 1), (3, 1), (2, 2, 2)])
def test_recursive_matches_naive(sizes):
    arch = Architecture(sizes)
    assert enumerate_network_functions(arch, budget=UNLIMITED) == naive_network_functions(arch)


def test_recursive_matches_naive_on_subset():
    S = PointSet(((0, 0), (1, 0), (1, 1)))
    arch = Architecture.of(2, 2, 1)
    assert enumerate_network_functions(arch, S) == naive_network_functions(arch, S)


def test_parallel_matches_serial():
    arch = Architecture.of(2, 2, 1)
    assert enumerate_network_functions(arch, jobs=2) == enumerate_network_functions(arch)


def test_truth_tables_are_distinct_functions():
    fns = enumerate_network_functions(Architecture.of(2, 1))
    tables = {to_truth_table(f, 2).values for f in fns}
    assert len(tables) == 14


def test_estimated_capacity_examples():
    e = estimated_capacity((8, 4))
    assert e.value == 256 and e.terms == (256,)
    e = estimated_capacity((4, 3, 2, 1))
    assert e.value == 70 and e.terms == (48, 18, 4) and e.bottlenecks == (4, 3, 2)


@pytest.mark.parametrize("n,m", [(2, 3), (5, 2), (4, 4), (7, 1)])
def test_output_node_adds_one_term(n, m):
    assert estimated_capacity((n, m, 1)).value - estimated_capacity((n, m)).value == min(n, m) * m


def test_upper_bound_examples():
    assert bound(network_upper_bounds(Architecture.of(4, 3)), "capacity-formula-upper").value == 48
    r = network_upper_bounds(Architecture.of(5, 4, 4), input_log_cardinality=3)
    assert bound(r, "restricted-formula-upper").value == 108
    small = network_upper_bounds(Architecture.of(2, 1))
    assert not bound(small, "capacity-formula-upper").hypotheses_hold
    assert bound(small, "capacity-formula-upper").holds_for_count(14)


def test_lower_bound_examples():
    assert bound(network_lower_bounds(Architecture.of(3, 2, 1)), "multiplexing-lower").value == 14 ** 2
    assert bound(network_lower_bounds(Architecture.of(4, 2, 1)), "multiplexing-lower").value == 104 ** 2
    b = bound(network_lower_bounds(Architecture.of(5, 1)), "cube-lower")
    assert b.value == 10
    assert multiplexing_lower_bound(9, 2).value == 56  # twice C(H^8) >= 8*7/2
    with pytest.raises(BoundUnavailable):
        multiplexing_lower_bound(2, 4)


def test_multiplexing_lower_bound_holds_exactly():
    report = exact_network_capacity(Architecture.of(3, 2, 1), budget=UNLIMITED)
    assert report.exact_count >= 196
    assert not report.violations()


def test_budget_errors_name_the_limit():
    with pytest.raises(BudgetExceeded, match="max_layer_functions"):
        count((3, 3, 3, 1), budget=Budget())
    with pytest.raises(BudgetExceeded, match="max_depth"):
        count((1, 1, 1, 1, 1, 1), budget=Budget())
    with pytest.raises(BudgetExceeded, match="max_points"):
        count((5, 1), budget=Budget())


def test_budget_parse():
    b = Budget.parse(["max_layer_functions=4096", "max-depth=6"])
    assert (b.max_layer_functions, b.max_depth, b.max_points) == (4096, 6, 16)
    with pytest.raises(ValueError):
        Budget.parse(["speed=3"])


def embedded_square():
    return PointSet(tuple(p + (0, 0) for p in PointSet.cube(2).points))


def test_restricted_embedded_square():
    r = restricted_capacity_bounds(embedded_square(), (2, 1))
    assert r.vc_dimension == 2 and r.sauer_shelah_holds
    assert bound(r.report, "vc-reduction-lower").value == count((2, 2, 1))
    exact = count((4, 2, 1), embedded_square())
    assert exact == count((2, 2, 1))
    assert not [b for b in r.report.bounds if b.hypotheses_hold and not b.holds_for_count(exact)]


def test_restricted_no_shattered_pair():
    S = PointSet(((0, 0, 0), (1, 1, 1)))
    r = restricted_capacity_bounds(S, (1,))
    assert r.vc_dimension == 1
    assert bound(r.report, "vc-reduction-lower").value == count((1, 1))
    single = restricted_capacity_bounds(PointSet(((1, 0, 1),)), (2, 1))
    assert single.vc_dimension == 0 and single.report.notes


def test_restricted_requires_boolean():
    with pytest.raises(ValueError):
        restricted_capacity_bounds(PointSet(((0, 2),)), (1,))


SETS = [
    PointSet.cube(1),
    PointSet.cube(2),
    *(PointSet.cube(2).subset(c) for c in itertools.combinations(range(4), 3)),
]


@pytest.mark.parametrize("S", SETS, ids=lambda S: f"{len(S)}pts")
@pytest.mark.parametrize("m", [1, 2, 3])
def test_single_layer_is_power_of_set_count(S, m):
    assert count((S.dimension, m), S) == count_threshold_functions(S) ** m


TINY = [c for N in range(2, 7) for c in compositions(N) if len(c) >= 2 and c[0] <= 2]


@pytest.fixture(scope="module")
def tiny_counts():
    return {c: count(c) for c in TINY}


def test_monotonicity(tiny_counts):
    for c in TINY:
        for i in range(len(c)):
            grown = c[:i] + (c[i] + 1,) + c[i + 1:]
            if grown[0] <= 2 and grown in tiny_counts:
                assert tiny_counts[grown] >= tiny_counts[c], (c, grown)


def test_sub_additivity(tiny_counts):
    for c in TINY:
        for k in range(1, len(c) - 1):
            left, right = c[:k + 1], c[k:]
            assert tiny_counts[c] <= count(left) * count(right), (c, k)


def test_contractivity(tiny_counts):
    for c in TINY:
        if sum(c) > 5:
            continue
        for k in range(1, len(c)):
            dup = c[:k + 1] + c[k:]
            assert count(dup) >= tiny_counts[c], (c, dup)


def test_exact_counts_within_valid_bounds(tiny_counts):
    for c in TINY:
        report = exact_network_capacity(Architecture(c), budget=UNLIMITED)
        assert report.exact_count == tiny_counts[c]
        assert not report.violations(), c
