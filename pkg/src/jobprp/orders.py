"""Orders, order files, order combining and picker sizing."""
from __future__ import annotations

import csv
import datetime as dt
import io
import math
import re
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import IO, Iterable, Mapping, Sequence

DEFAULT_BASKET_CAPACITY = 40

_PICK_RE = re.compile(r"^(\d+)x(\d+)$")
_HEADER_RE = re.compile(r"^(\d+)\s*:(.*)$")


class OrderFileError(ValueError):
    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}" if lineno is not None else message)


@dataclass(frozen=True)
class Order:
    order_id: int
    picks: Mapping[int, int]
    customer_id: int | None = None

    def __post_init__(self):
        if not self.picks:
            raise ValueError(f"order {self.order_id} has no picks")
        if any(q < 1 for q in self.picks.values()):
            raise ValueError(f"order {self.order_id} has a non-positive quantity")

    @property
    def products(self) -> frozenset[int]:
        return frozenset(self.picks)

    @property
    def weight(self) -> int:
        return order_weight(self)

    def __hash__(self):
        return hash(self.order_id)


@dataclass
class OrderSet:
    orders: list[Order]
    delta_days: int | None = None
    order_count: int | None = None

    def __post_init__(self):
        ids = [o.order_id for o in self.orders]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate order ids")
        if self.order_count is None:
            self.order_count = len(self.orders)

    def __iter__(self):
        return iter(self.orders)

    def __len__(self):
        return len(self.orders)

    def __getitem__(self, i):
        return self.orders[i]

    def by_id(self) -> dict[int, Order]:
        return {o.order_id: o for o in self.orders}


@dataclass(frozen=True)
class PickerProfile:
    baskets_per_picker: int
    basket_capacity_items: int = DEFAULT_BASKET_CAPACITY

    def __post_init__(self):
        if self.baskets_per_picker < 1 or self.basket_capacity_items < 1:
            raise ValueError("basket counts and capacities must be positive")

    @property
    def capacity_items(self) -> int:
        return self.baskets_per_picker * self.basket_capacity_items

    @classmethod
    def from_capacity(cls, capacity_items: int, basket_capacity_items: int = DEFAULT_BASKET_CAPACITY):
        """Profile for a picker capacity given in items, e.g. 320 -> 8 baskets of 40."""
        baskets, rest = divmod(capacity_items, basket_capacity_items)
        if rest or baskets < 1:
            raise ValueError(
                f"capacity {capacity_items} is not a positive multiple of {basket_capacity_items}"
            )
        return cls(baskets, basket_capacity_items)


# --- order files ----------------------------------------------------------

def parse_orders(lines: Iterable[str]) -> OrderSet:
    orders = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _HEADER_RE.match(line)
        if not m:
            raise OrderFileError(f"expected 'ORDER_ID: PRODUCTxQTY ...', got {line!r}", lineno)
        picks: dict[int, int] = {}
        for token in m.group(2).split():
            pm = _PICK_RE.match(token)
            if not pm:
                raise OrderFileError(f"malformed pick {token!r}", lineno)
            product, qty = int(pm.group(1)), int(pm.group(2))
            if qty < 1:
                raise OrderFileError(f"quantity must be positive in {token!r}", lineno)
            picks[product] = picks.get(product, 0) + qty
        if not picks:
            raise OrderFileError("order without picks", lineno)
        orders.append(Order(int(m.group(1)), picks))
    if not orders:
        raise OrderFileError("no orders found")
    try:
        return OrderSet(orders)
    except ValueError as exc:
        raise OrderFileError(str(exc)) from None


_INSTANCE_RE = re.compile(r"d(\d+)_ord(\d+)")


def parse_order_file(source: str | Path | IO[str]) -> OrderSet:
    """Read an order file from a path or an open text stream.

    File names of the form ``..._d<DELTA>_ord<O>...`` set ``delta_days`` and
    ``order_count``.
    """
    if hasattr(source, "read"):
        return parse_orders(source)
    path = Path(source)
    with path.open(encoding="utf-8") as fh:
        orders = parse_orders(fh)
    m = _INSTANCE_RE.search(path.name)
    if m:
        orders.delta_days = int(m.group(1))
        orders.order_count = int(m.group(2))
    return orders


def format_orders(orders: Iterable[Order]) -> str:
    return "".join(
        f"{o.order_id}: " + " ".join(f"{p}x{q}" for p, q in o.picks.items()) + "\n"
        for o in orders
    )


def write_order_file(path, orders: Iterable[Order], comment: str | None = None):
    with open(path, "w", encoding="utf-8") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        fh.write(format_orders(orders))


# --- purchase history -----------------------------------------------------

@dataclass(frozen=True)
class Purchase:
    customer_id: int
    date: dt.date
    product_id: int
    quantity: int


def read_purchases(source: str | Path | IO[str]) -> list[Purchase]:
    """Read ``customer_id,date,product_id,quantity`` CSV rows (header optional)."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        text = Path(source).read_text(encoding="utf-8")
    purchases = []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or row[0].startswith("#"):
            continue
        if lineno == 1 and row[0].strip() == "customer_id":
            continue
        try:
            cust, date, prod, qty = (f.strip() for f in row)
            purchases.append(Purchase(int(cust), dt.date.fromisoformat(date), int(prod), int(qty)))
        except ValueError as exc:
            raise OrderFileError(f"bad purchase row {row!r} ({exc})", lineno) from None
    return purchases


@dataclass(frozen=True)
class CombinedOrder:
    customer_id: int
    picks: Mapping[int, int] = field(hash=False)

    @property
    def distinct_products(self) -> int:
        return len(self.picks)


def combine_orders(purchases: Iterable[Purchase], delta: int) -> list[CombinedOrder]:
    """Merge each customer's purchases from their first ``delta`` days.

    The window is anchored at the customer's first purchase date and covers
    days ``first .. first + delta - 1``. Repeated products add up. Output is
    sorted by customer id.
    """
    if delta < 1:
        raise ValueError("delta must be >= 1")
    by_customer: dict[int, list[Purchase]] = defaultdict(list)
    for p in purchases:
        by_customer[p.customer_id].append(p)
    combined = []
    for cust in sorted(by_customer):
        rows = by_customer[cust]
        first = min(p.date for p in rows)
        picks: dict[int, int] = {}
        for p in rows:
            if (p.date - first).days < delta:
                picks[p.product_id] = picks.get(p.product_id, 0) + p.quantity
        combined.append(CombinedOrder(cust, picks))
    return combined


def select_test_instance(combined: Sequence[CombinedOrder], count: int,
                         delta: int | None = None) -> OrderSet:
    """Take the ``count`` combined orders with the most distinct products.

    Ties go to the smaller customer id, so instance(O) is a prefix of
    instance(O + 1). Orders are renumbered ``1..count`` in rank order.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if len(combined) < count:
        raise ValueError(f"only {len(combined)} combined orders, {count} requested")
    ranked = sorted(combined, key=lambda c: (-c.distinct_products, c.customer_id))[:count]
    orders = [Order(i, dict(c.picks), c.customer_id) for i, c in enumerate(ranked, start=1)]
    return OrderSet(orders, delta_days=delta, order_count=count)


# --- weights and pickers --------------------------------------------------

def order_weight(order: Order) -> int:
    """Total number of items in ``order``."""
    return sum(order.picks.values())


def baskets_required(order: Order, profile: PickerProfile) -> int:
    return -(-order_weight(order) // profile.basket_capacity_items)


def available_pickers(orders: Iterable[Order], profile: PickerProfile) -> int:
    """T = ceil(sum(b_o) / B + 0.2)."""
    total = sum(baskets_required(o, profile) for o in orders)
    return math.ceil(Fraction(total, profile.baskets_per_picker) + Fraction(1, 5))


def check_routable(orders: Iterable[Order], profile: PickerProfile):
    """Reject orders that one picker cannot carry."""
    for o in orders:
        b = baskets_required(o, profile)
        if b > profile.baskets_per_picker:
            raise ValueError(
                f"order {o.order_id} needs {b} baskets, a picker carries {profile.baskets_per_picker}"
            )
