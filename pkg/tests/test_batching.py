import io
import random
from decimal import Decimal

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jobprp.batching import (INFEASIBLE, OrderRouter, SavingsMatrix, clarke_wright, compute_savings,
                             method_routers, optimal_baseline, quality_of_solution, run_method,
                             time_savings_heuristic, trivial_batching)
from jobprp.orders import Order
from jobprp.routing import CapabilityError, NearestNeighborRouter, OptimalRouter, Route, SShapeRouter, make_router
from jobprp.warehouse import WarehouseConfig, generate_warehouse

from . import tables
from .conftest import random_orders


def unit_orders(weights):
    return [Order(i, {i: w}) for i, w in enumerate(weights, start=1)]


def matrix(table):
    return SavingsMatrix.read_csv(io.StringIO(tables.to_csv(table)))


class StubRouter:
    """Route lengths looked up by the set of order ids, for layouts given only as distances."""

    def __init__(self, lengths):
        self.lengths = {frozenset(k): v for k, v in lengths.items()}

    def route_orders(self, orders):
        return Route((1,), self.lengths[frozenset(o.order_id for o in orders)])


# --- savings matrix -------------------------------------------------------------------

def test_matrix_is_symmetric_and_parses_markers():
    m = matrix(tables.SAVINGS_7)
    assert m[1, 2] is INFEASIBLE and m[2, 1] is INFEASIBLE
    assert m[5, 3] == m[3, 5] == 940
    assert m[7, 1] == -100
    assert len(m) == 21
    with pytest.raises(ValueError):
        m[3, 3] = 1


def test_matrix_csv_round_trip():
    m = matrix(tables.SAVINGS_10_OPTIMAL)
    out = io.StringIO()
    m.write_csv(out)
    again = SavingsMatrix.read_csv(io.StringIO(out.getvalue()))
    assert dict(again.items()) == dict(m.items())
    assert m[10, 5] == Decimal("1324.7")


def test_ranked_pairs_tie_break():
    m = SavingsMatrix({(2, 3): 5, (1, 4): 5, (1, 2): 7, (3, 4): INFEASIBLE})
    assert m.ranked_pairs() == [(1, 2), (1, 4), (2, 3)]


def test_infeasible_iff_over_capacity(small_warehouse):
    rng = random.Random(2)
    orders = random_orders(rng, 12, 6)
    cap = 6
    m = compute_savings(orders, OrderRouter(SShapeRouter(small_warehouse)), cap)
    for a in orders:
        for b in orders:
            if a.order_id < b.order_id:
                assert (m[a.order_id, b.order_id] is INFEASIBLE) == (a.weight + b.weight > cap)


def test_savings_of_identical_single_picks(small_warehouse):
    router = OrderRouter(SShapeRouter(small_warehouse))
    a, b = Order(1, {5: 1}), Order(2, {5: 1})
    d = router.route_orders([a]).length
    assert compute_savings([a, b], router, 10)[1, 2] == d


@pytest.mark.parametrize("name", ["nn", "ss", "lg", "opt"])
def test_savings_recomputed_from_three_routes(medium_warehouse, name):
    orders = random_orders(random.Random(7), 120, 4)
    router = OrderRouter(make_router(name, medium_warehouse))
    m = compute_savings(orders, router, 1000)
    for i, oi in enumerate(orders):
        for oj in orders[i + 1:]:
            fresh = OrderRouter(make_router(name, generate_warehouse(medium_warehouse.config)))
            expect = (fresh.route_orders([oi]).length + fresh.route_orders([oj]).length
                      - fresh.route_orders([oi, oj]).length)
            assert m[oi.order_id, oj.order_id] == expect


# --- C&W sweep ----------------------------------------------------------------------------

def test_seven_order_trace():
    orders = unit_orders(tables.WEIGHTS_7)
    batches, trace = clarke_wright(orders, matrix(tables.SAVINGS_7), tables.CAPACITY_7)
    assert batches == [[3, 5], [4, 6], [2, 7], [1]]
    assert trace == [((3, 5),), ((3, 5), (4, 6)), ((3, 5), (4, 6), (2, 7))]


def test_ten_order_sshape_savings_give_one_batch():
    orders = unit_orders([1] * 10)
    batches, _ = clarke_wright(orders, matrix(tables.SAVINGS_10_SSHAPE), tables.CAPACITY_10)
    assert batches == [[3, 4, 1, 5, 9, 10, 2, 6, 8, 7]]


def test_ten_order_optimal_savings_split():
    orders = unit_orders([1] * 10)
    m = matrix(tables.SAVINGS_10_OPTIMAL)
    batches, trace = clarke_wright(orders, m, tables.CAPACITY_10)
    assert trace[:3] == [((3, 4),), ((3, 4, 1),), ((3, 4, 1), (5, 10))]
    assert m[5, 10] > m[1, 5]
    assert [set(b) for b in batches] == [{3, 4, 1, 2, 8, 7}, {5, 10, 6, 9}]


def test_negative_savings_still_merge():
    orders = unit_orders([1, 1])
    batches, _ = clarke_wright(orders, SavingsMatrix({(1, 2): -30}), 5)
    assert batches == [[1, 2]]


def test_over_capacity_order_rejected():
    with pytest.raises(ValueError):
        clarke_wright(unit_orders([9, 1]), SavingsMatrix({(1, 2): 1}), 8)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(1, 6), min_size=1, max_size=9), st.integers(6, 14), st.randoms(use_true_random=False))
def test_sweep_partition_capacity_and_growth(weights, cap, rng):
    orders = unit_orders(weights)
    m = SavingsMatrix()
    for a in orders:
        for b in orders:
            if a.order_id < b.order_id:
                m[a.order_id, b.order_id] = (INFEASIBLE if a.weight + b.weight > cap
                                             else rng.choice([rng.randint(-20, 60), 10]))
    batches, trace = clarke_wright(orders, m, cap)
    flat = sorted(i for b in batches for i in b)
    assert flat == [o.order_id for o in orders]
    w = {o.order_id: o.weight for o in orders}
    assert all(sum(w[i] for i in b) <= cap for b in batches)
    # batches only grow or appear
    for before, after in zip(trace, trace[1:]):
        assert len(after) >= len(before)
        for old, new in zip(before, after):
            assert new[:len(old)] == old


# --- composed heuristics ---------------------------------------------------------------------

def test_worked_example_objective_and_quality():
    orders = unit_orders(tables.WEIGHTS_7)
    batch_lengths = StubRouter({(3, 5): 1080, (4, 6): 1080, (2, 7): 1080, (1,): 890})
    result = time_savings_heuristic(orders, None, batch_lengths, tables.CAPACITY_7,
                                    savings=matrix(tables.SAVINGS_7))
    assert result.objective == 4130
    assert result.picker_count == 4
    single = StubRouter({(i,): d for i, d in enumerate([810, 870, 810, 780, 730, 880, 90], start=1)})
    baseline = trivial_batching(orders, single)
    assert baseline.objective == 4970
    assert round(quality_of_solution(baseline.objective, result.objective), 4) == 0.1690


def test_single_order(medium_warehouse):
    o = random_orders(random.Random(1), 120, 1)
    router = OrderRouter(SShapeRouter(medium_warehouse))
    result = time_savings_heuristic(o, router, router, 100)
    assert result.partition() == [frozenset({1})]
    assert result.batches[0].route == router.route_orders(o)
    assert trivial_batching(o, router).objective == router.route_orders(o).length


def test_trivial_batching_sums_independent_routes(medium_warehouse):
    orders = random_orders(random.Random(3), 120, 3)
    result = optimal_baseline(orders, medium_warehouse)
    fresh = generate_warehouse(medium_warehouse.config)
    assert result.objective == sum(OptimalRouter(fresh).route({fresh.locate(p) for p in o.picks}).length
                                   for o in orders)
    assert result.picker_count == 3


def test_method_three_single_order(medium_warehouse):
    o = random_orders(random.Random(4), 120, 1)
    expect = OptimalRouter(medium_warehouse).route({medium_warehouse.locate(p) for p in o[0].picks}).length
    assert run_method(3, None, o, 50, medium_warehouse).objective == expect


def test_method_router_table():
    assert method_routers(1, "lg") == ("lg", "lg")
    assert method_routers(2, "nn") == ("nn", "opt")
    assert method_routers(3, "ss") == ("opt", "opt")
    with pytest.raises(ValueError):
        method_routers(2, "opt")
    with pytest.raises(ValueError):
        method_routers(4, "ss")


@pytest.mark.parametrize("seed", range(4))
@pytest.mark.parametrize("heuristic", ["nn", "ss", "lg"])
def test_method_two_dominates_method_one(seed, heuristic):
    wh = generate_warehouse(WarehouseConfig(4, 3, 1, 64))
    orders = random_orders(random.Random(seed), 64, 6)
    m1 = run_method(1, heuristic, orders, 8, wh)
    m2 = run_method(2, heuristic, orders, 8, wh)
    assert m1.partition() == m2.partition()
    assert m2.objective <= m1.objective
    assert m1.elapsed > 0


def test_batch_over_exact_bound_names_the_batch(medium_warehouse):
    orders = [Order(1, {p: 1 for p in range(1, 41, 4)}), Order(2, {p: 1 for p in range(41, 81, 4)})]
    with pytest.raises(CapabilityError, match=r"batch \[1, 2\]"):
        run_method(2, "ss", orders, 100, medium_warehouse, exact_bound=18)


def test_result_csv(small_warehouse):
    orders = random_orders(random.Random(5), 12, 3)
    result = run_method(1, "nn", orders, 100, small_warehouse)
    out = io.StringIO()
    result.write_csv(out)
    lines = out.getvalue().splitlines()
    assert lines[0] == "batch_id,order_ids,weight,distance"
    assert lines[-1].startswith("total,,")
    assert lines[-1].endswith(f"{result.objective / 10:.2f}")


# --- quality metric ----------------------------------------------------------------------------

def test_quality_examples():
    assert round(quality_of_solution(497, 413), 4) == 0.1690
    assert quality_of_solution(120, 120) == 0
    assert quality_of_solution(100, 110) == pytest.approx(-0.10)
    with pytest.raises(ValueError):
        quality_of_solution(0, 5)


def test_nearest_neighbor_vs_optimal_batches(small_warehouse):
    orders = random_orders(random.Random(9), 12, 4)
    nn = OrderRouter(NearestNeighborRouter(small_warehouse))
    opt = OrderRouter(OptimalRouter(small_warehouse))
    a = time_savings_heuristic(orders, nn, nn, 8)
    b = time_savings_heuristic(orders, nn, opt, 8, savings=a.savings)
    assert a.partition() == b.partition() and b.objective <= a.objective
