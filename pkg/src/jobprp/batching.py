"""Order batching with the Time Savings Heuristic and the Methods 1-3 pipelines."""
from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field
from decimal import Decimal
from typing import IO, Iterable, Protocol, Sequence

from .orders import Order, order_weight
from .routing import CapabilityError, OptimalRouter, Route, Router, make_router
from .routing.optimal import DEFAULT_EXACT_BOUND


class _Infeasible:
    def __repr__(self):
        return "INFEASIBLE"


INFEASIBLE = _Infeasible()


class OrderRouting(Protocol):
    def route_orders(self, orders: Sequence[Order]) -> Route: ...


class OrderRouter:
    """Routes a group of orders by the pick locations of their products."""

    def __init__(self, router: Router):
        self.router = router
        self.name = router.name

    def pick_nodes(self, orders: Iterable[Order]) -> frozenset[int]:
        locate = self.router.warehouse.locate
        return frozenset(locate(p) for o in orders for p in o.picks)

    def route_orders(self, orders):
        return self.router.route(self.pick_nodes(orders))


def _pair(i, j):
    return (i, j) if i <= j else (j, i)


class SavingsMatrix:
    """Symmetric pairwise savings in decimeters; capacity-infeasible pairs hold INFEASIBLE."""

    def __init__(self, entries: dict | None = None):
        self._entries = {}
        for (i, j), value in (entries or {}).items():
            self[i, j] = value

    def __setitem__(self, key, value):
        i, j = key
        if i == j:
            raise ValueError("savings are defined for distinct orders only")
        self._entries[_pair(i, j)] = value

    def __getitem__(self, key):
        return self._entries[_pair(*key)]

    def __contains__(self, key):
        return _pair(*key) in self._entries

    def __len__(self):
        return len(self._entries)

    def items(self):
        return self._entries.items()

    def ranked_pairs(self) -> list[tuple[int, int]]:
        """Feasible pairs by decreasing savings; ties take the lexicographically smaller pair."""
        feasible = [(s, ij) for ij, s in self._entries.items() if s is not INFEASIBLE]
        feasible.sort(key=lambda e: (-e[0], e[1]))
        return [ij for _, ij in feasible]

    @classmethod
    def read_csv(cls, source: IO[str] | str) -> "SavingsMatrix":
        """Parse ``i,j,savings`` rows, savings in meters or ``X`` for infeasible."""
        fh = open(source, encoding="utf-8") if isinstance(source, str) else source
        try:
            matrix = cls()
            for lineno, row in enumerate(csv.reader(fh), start=1):
                if not row or row[0].strip().startswith("#"):
                    continue
                if len(row) != 3:
                    raise ValueError(f"line {lineno}: expected i,j,savings")
                i, j, s = (f.strip() for f in row)
                matrix[int(i), int(j)] = INFEASIBLE if s.upper() == "X" else Decimal(s) * 10
            return matrix
        finally:
            if isinstance(source, str):
                fh.close()

    def write_csv(self, fh: IO[str]):
        for (i, j), s in sorted(self._entries.items(), key=lambda e: (e[0][1], e[0][0])):
            hi, lo = j, i  # lower-triangular: row index > column index
            value = "X" if s is INFEASIBLE else f"{Decimal(s) / 10:f}"
            fh.write(f"{hi},{lo},{value}\n")


def compute_savings(orders: Sequence[Order], savings_router: OrderRouting, capacity: int) -> SavingsMatrix:
    """s_ij = d_i + d_j - d_ij with every distance from ``savings_router``."""
    single = {o.order_id: savings_router.route_orders([o]).length for o in orders}
    matrix = SavingsMatrix()
    for a, oi in enumerate(orders):
        for oj in orders[a + 1:]:
            if oi.weight + oj.weight > capacity:
                matrix[oi.order_id, oj.order_id] = INFEASIBLE
                continue
            joint = savings_router.route_orders([oi, oj]).length
            matrix[oi.order_id, oj.order_id] = single[oi.order_id] + single[oj.order_id] - joint
    return matrix


def clarke_wright(orders: Sequence[Order], savings: SavingsMatrix, capacity: int):
    """C&W(i) sweep over the savings list.

    Returns ``(batches, trace)``: lists of order ids in creation order, and a
    snapshot of the batches after every merge event.
    """
    weight = {o.order_id: o.weight for o in orders}
    for oid, w in weight.items():
        if w > capacity:
            raise ValueError(f"order {oid} weighs {w} items, above the picker capacity {capacity}")
    batches: list[list[int]] = []
    load: list[int] = []
    home: dict[int, int] = {}
    trace = []

    for i, j in savings.ranked_pairs():
        if len(home) == len(weight):
            break
        if i not in weight or j not in weight:
            continue
        bi, bj = home.get(i), home.get(j)
        if bi is None and bj is None:
            if weight[i] + weight[j] > capacity:
                continue
            home[i] = home[j] = len(batches)
            batches.append([i, j])
            load.append(weight[i] + weight[j])
        elif bi is not None and bj is not None:
            continue
        else:
            b, new = (bi, j) if bi is not None else (bj, i)
            if load[b] + weight[new] > capacity:
                continue
            batches[b].append(new)
            load[b] += weight[new]
            home[new] = b
        trace.append(tuple(tuple(b) for b in batches))

    for o in orders:
        if o.order_id not in home:
            home[o.order_id] = len(batches)
            batches.append([o.order_id])
    return batches, trace


@dataclass
class Batch:
    order_ids: tuple[int, ...]
    weight: int
    route: Route | None = None

    @property
    def length(self) -> int:
        return self.route.length if self.route is not None else 0


@dataclass
class BatchingResult:
    batches: list[Batch]
    elapsed: float = 0.0
    savings: SavingsMatrix | None = None
    trace: list = field(default_factory=list)

    @property
    def objective(self) -> int:
        """Total route length over all batches, decimeters."""
        return sum(b.length for b in self.batches)

    @property
    def objective_m(self) -> float:
        return round(self.objective / 10, 2)

    @property
    def picker_count(self) -> int:
        return sum(1 for b in self.batches if b.order_ids)

    def partition(self) -> list[frozenset[int]]:
        return [frozenset(b.order_ids) for b in self.batches]

    def write_csv(self, fh: IO[str]):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["batch_id", "order_ids", "weight", "distance"])
        for k, b in enumerate(self.batches, start=1):
            writer.writerow([k, " ".join(map(str, b.order_ids)), b.weight, f"{b.length / 10:.2f}"])
        writer.writerow(["total", "", sum(b.weight for b in self.batches), f"{self.objective / 10:.2f}"])


def route_batches(groups: Sequence[Sequence[int]], orders: Sequence[Order],
                  batch_router: OrderRouting) -> list[Batch]:
    by_id = {o.order_id: o for o in orders}
    batches = []
    for ids in groups:
        members = [by_id[i] for i in ids]
        try:
            route = batch_router.route_orders(members)
        except CapabilityError as exc:
            raise CapabilityError(f"batch {list(ids)}: {exc}") from exc
        batches.append(Batch(tuple(ids), sum(order_weight(o) for o in members), route))
    return batches


def time_savings_heuristic(orders: Sequence[Order], savings_router: OrderRouting | None,
                           batch_router: OrderRouting, capacity: int,
                           savings: SavingsMatrix | None = None) -> BatchingResult:
    """Batch with C&W(i) on savings from ``savings_router``, then route each batch.

    Passing ``savings`` skips the savings computation (``savings_router`` may
    then be None).
    """
    start = time.perf_counter()
    orders = list(orders)
    if savings is None:
        savings = compute_savings(orders, savings_router, capacity)
    groups, trace = clarke_wright(orders, savings, capacity)
    batches = route_batches(groups, orders, batch_router)
    return BatchingResult(batches, time.perf_counter() - start, savings, trace)


def trivial_batching(orders: Sequence[Order], router: OrderRouting) -> BatchingResult:
    """One picker per order."""
    start = time.perf_counter()
    batches = route_batches([[o.order_id] for o in orders], orders, router)
    return BatchingResult(batches, time.perf_counter() - start)


METHODS = (1, 2, 3)


def method_routers(method: int, heuristic: str | None) -> tuple[str, str]:
    """(savings router, batch router) names for a method."""
    if method == 3:
        return "opt", "opt"
    if method not in (1, 2):
        raise ValueError(f"unknown method {method}")
    if heuristic not in ("nn", "ss", "lg"):
        raise ValueError(f"method {method} needs a heuristic router (nn, ss or lg), got {heuristic!r}")
    return (heuristic, heuristic) if method == 1 else (heuristic, "opt")


def run_method(method: int, heuristic: str | None, orders: Sequence[Order], capacity: int,
               warehouse, cache=None, exact_bound: int = DEFAULT_EXACT_BOUND) -> BatchingResult:
    """Method 1 = TSH(h, h), Method 2 = TSH(h, opt), Method 3 = TSH(opt, opt)."""
    sr_name, br_name = method_routers(method, heuristic)

    def build(name):
        kwargs = {"max_picks": exact_bound} if name == "opt" else {}
        return OrderRouter(make_router(name, warehouse, cache, **kwargs))

    start = time.perf_counter()
    result = time_savings_heuristic(orders, build(sr_name), build(br_name), capacity)
    result.elapsed = time.perf_counter() - start
    return result


def optimal_baseline(orders: Sequence[Order], warehouse, cache=None,
                     exact_bound: int = DEFAULT_EXACT_BOUND) -> BatchingResult:
    """Trivial batching with every order routed optimally."""
    return trivial_batching(orders, OrderRouter(OptimalRouter(warehouse, cache, max_picks=exact_bound)))


def quality_of_solution(baseline: float, objective: float) -> float:
    """Relative distance reduction against the no-batching baseline; negative if worse."""
    if baseline == 0:
        raise ValueError("baseline distance must be positive")
    return (baseline - objective) / baseline
