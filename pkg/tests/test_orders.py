import datetime as dt
import io
import random
from collections import defaultdict
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from jobprp.orders import (CombinedOrder, Order, OrderFileError, OrderSet, PickerProfile, Purchase,
                           available_pickers, baskets_required, check_routable, combine_orders,
                           format_orders, order_weight, parse_order_file, read_purchases,
                           select_test_instance, write_order_file)

from .conftest import random_orders

DATA = Path(__file__).parent / "data"
DAY = dt.date(2024, 3, 1)


def day(n):
    return DAY + dt.timedelta(days=n - 1)


# --- order files ----------------------------------------------------------------

def test_single_record():
    orders = parse_order_file(io.StringIO("1: 17x2 23x1\n"))
    assert len(orders) == 1
    assert orders[0].order_id == 1
    assert dict(orders[0].picks) == {17: 2, 23: 1}


def test_fixture_file_has_ten_orders():
    orders = parse_order_file(DATA / "instances_d5_ord10.txt")
    assert [o.order_id for o in orders] == list(range(1, 11))
    assert (orders.delta_days, orders.order_count) == (5, 10)
    first = (DATA / "instances_d5_ord10.txt").read_text(encoding="utf-8").splitlines()[1]
    assert format_orders([orders[0]]).strip() == first


def test_comments_and_blank_lines_skipped():
    orders = parse_order_file(io.StringIO("# header\n\n2: 5x1\n   \n3: 6x2 6x1\n"))
    assert [o.order_id for o in orders] == [2, 3]
    assert dict(orders[1].picks) == {6: 3}


@pytest.mark.parametrize("text,line", [
    ("abc\n", 1),
    ("1: 2x1\n2: 3y1\n", 2),
    ("1: 2x0\n", 1),
    ("1:\n", 1),
])
def test_malformed_lines_name_their_line(text, line):
    with pytest.raises(OrderFileError) as err:
        parse_order_file(io.StringIO(text))
    assert err.value.lineno == line
    assert f"line {line}" in str(err.value)


def test_empty_file_and_duplicate_ids():
    with pytest.raises(OrderFileError):
        parse_order_file(io.StringIO("# nothing\n"))
    with pytest.raises(OrderFileError):
        parse_order_file(io.StringIO("1: 2x1\n1: 3x1\n"))


def test_round_trip(tmp_path):
    orders = random_orders(random.Random(1), 50, 6)
    write_order_file(tmp_path / "x_d3_ord6.txt", orders, comment="round trip")
    back = parse_order_file(tmp_path / "x_d3_ord6.txt")
    assert [(o.order_id, dict(o.picks)) for o in back] == [(o.order_id, dict(o.picks)) for o in orders]


def test_order_invariants():
    with pytest.raises(ValueError):
        Order(1, {})
    with pytest.raises(ValueError):
        Order(1, {3: 0})
    with pytest.raises(ValueError):
        OrderSet([Order(1, {1: 1}), Order(1, {2: 1})])


# --- combining purchases ------------------------------------------------------------

def test_purchases_within_window_are_merged():
    rows = [Purchase(7, day(1), 10, 1), Purchase(7, day(3), 10, 2), Purchase(7, day(3), 11, 1)]
    [c] = combine_orders(rows, 5)
    assert dict(c.picks) == {10: 3, 11: 1}


def test_purchases_after_window_are_dropped():
    rows = [Purchase(7, day(1), 10, 1), Purchase(7, day(20), 11, 4)]
    [c] = combine_orders(rows, 5)
    assert dict(c.picks) == {10: 1}


def test_window_boundary():
    rows = [Purchase(1, day(1), 1, 1), Purchase(1, day(5), 2, 1), Purchase(1, day(6), 3, 1)]
    assert set(combine_orders(rows, 5)[0].picks) == {1, 2}
    with pytest.raises(ValueError):
        combine_orders(rows, 0)


def _merge_oracle(purchases, delta):
    """Filter each customer's rows to the window, then add up quantities."""
    out = {}
    for cust in {p.customer_id for p in purchases}:
        mine = [p for p in purchases if p.customer_id == cust]
        start = min(p.date for p in mine)
        kept = [p for p in mine if p.date <= start + dt.timedelta(days=delta - 1)]
        total = defaultdict(int)
        for p in kept:
            total[p.product_id] += p.quantity
        out[cust] = dict(total)
    return out


@pytest.mark.parametrize("seed", range(5))
def test_combine_matches_filter_and_merge(seed):
    rng = random.Random(seed)
    purchases = [Purchase(rng.randint(1, 3), day(rng.randint(1, 30)), rng.randint(1, 15), rng.randint(1, 4))
                 for _ in range(60)]
    rng.shuffle(purchases)
    for delta in (1, 5, 10):
        got = {c.customer_id: dict(c.picks) for c in combine_orders(purchases, delta)}
        assert got == _merge_oracle(purchases, delta)


def test_combine_is_idempotent_on_single_date_input():
    rows = [Purchase(1, day(2), 4, 2), Purchase(2, day(9), 5, 1), Purchase(2, day(9), 6, 3)]
    once = combine_orders(rows, 3)
    flattened = [Purchase(c.customer_id, day(1), p, q) for c in once for p, q in c.picks.items()]
    assert [dict(c.picks) for c in combine_orders(flattened, 3)] == [dict(c.picks) for c in once]


def test_read_purchases(tmp_path):
    purchases = read_purchases(DATA / "purchases.csv")
    assert purchases and all(p.quantity >= 1 for p in purchases)
    (tmp_path / "bad.csv").write_text("1,2024-01-01,3,1\n1,notadate,3,1\n", encoding="utf-8")
    with pytest.raises(OrderFileError) as err:
        read_purchases(tmp_path / "bad.csv")
    assert err.value.lineno == 2


# --- test instances -------------------------------------------------------------------

def _pool(rng, n):
    return [CombinedOrder(c, {p: 1 for p in rng.sample(range(1, 30), rng.randint(1, 8))}) for c in range(1, n + 1)]


def test_single_largest_order():
    pool = [CombinedOrder(1, {1: 1}), CombinedOrder(2, {1: 1, 2: 1, 3: 1}), CombinedOrder(3, {4: 5})]
    inst = select_test_instance(pool, 1)
    assert inst[0].customer_id == 2 and inst[0].order_id == 1


def test_nested_instances():
    pool = _pool(random.Random(11), 20)
    eight = select_test_instance(pool, 8)
    nine = select_test_instance(pool, 9)
    assert [o.customer_id for o in nine][:8] == [o.customer_id for o in eight]


@pytest.mark.parametrize("seed", range(3))
def test_selection_matches_full_sort(seed):
    pool = _pool(random.Random(seed), 20)
    rng = random.Random(seed + 100)
    shuffled = pool[:]
    rng.shuffle(shuffled)
    # rank by count descending; stable sort over ids ascending keeps smaller ids first on ties
    oracle = sorted(sorted(pool, key=lambda c: c.customer_id), key=lambda c: len(c.picks), reverse=True)
    got = select_test_instance(shuffled, 10)
    assert [o.customer_id for o in got] == [c.customer_id for c in oracle[:10]]


def test_selection_needs_enough_orders():
    with pytest.raises(ValueError):
        select_test_instance(_pool(random.Random(0), 3), 4)


@given(st.lists(st.integers(1, 6), min_size=2, max_size=15), st.data())
def test_selection_prefix_property(sizes, data):
    pool = [CombinedOrder(i + 1, {p: 1 for p in range(s)}) for i, s in enumerate(sizes)]
    k = data.draw(st.integers(1, len(pool) - 1))
    small, large = select_test_instance(pool, k), select_test_instance(pool, k + 1)
    assert [o.customer_id for o in large][:k] == [o.customer_id for o in small]


# --- weights and pickers ------------------------------------------------------------------

def test_weight_counts_items():
    assert order_weight(Order(1, {1: 2, 2: 2})) == 4


@pytest.mark.parametrize("weight,baskets", [(40, 1), (41, 2), (1, 1), (80, 2)])
def test_baskets_required(weight, baskets):
    assert baskets_required(Order(1, {1: weight}), PickerProfile(8)) == baskets


@pytest.mark.parametrize("total,B,expected", [(10, 8, 2), (8, 8, 2), (6, 8, 1)])
def test_available_pickers(total, B, expected):
    orders = [Order(i, {1: 40}) for i in range(total)]
    assert available_pickers(orders, PickerProfile(B)) == expected


def test_profile():
    assert PickerProfile.from_capacity(320).baskets_per_picker == 8
    assert PickerProfile(8).capacity_items == 320
    with pytest.raises(ValueError):
        PickerProfile.from_capacity(50)
    with pytest.raises(ValueError):
        PickerProfile(0)


def test_oversized_order_rejected():
    check_routable([Order(1, {1: 80})], PickerProfile(2))
    with pytest.raises(ValueError):
        check_routable([Order(1, {1: 81})], PickerProfile(2))


@given(st.dictionaries(st.integers(1, 100), st.integers(1, 200), min_size=1, max_size=8), st.integers(1, 60))
def test_weight_and_baskets_positive(picks, basket):
    o = Order(1, picks)
    assert o.weight >= 1
    assert baskets_required(o, PickerProfile(1, basket)) >= 1
