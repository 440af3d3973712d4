"""Exhaustive solver for tiny batching-and-routing instances.

Every set partition of the orders is enumerated, capacity-violating ones are
dropped and each remaining part is routed optimally. It serves as ground
truth for the heuristics, so it is deliberately simple rather than fast.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

from .orders import Order
from .routing import CapabilityError, OptimalRouter, Route
from .routing.optimal import DEFAULT_EXACT_BOUND

DEFAULT_MAX_ORDERS = 8


def set_partitions(items: Sequence) -> Iterator[list[list]]:
    """All partitions of ``items`` via restricted growth strings."""
    n = len(items)
    if n == 0:
        yield []
        return
    labels = [0] * n
    while True:
        parts: list[list] = []
        for item, label in zip(items, labels):
            if label == len(parts):
                parts.append([])
            parts[label].append(item)
        yield parts
        # next restricted growth string
        i = n - 1
        while i > 0 and labels[i] > max(labels[:i]):
            i -= 1
        if i == 0:
            return
        labels[i] += 1
        for k in range(i + 1, n):
            labels[k] = 0


@dataclass
class OracleResult:
    partition: list[frozenset[int]]
    routes: dict[frozenset[int], Route | None]
    objective: int
    partitions_enumerated: int
    feasible_partitions: int

    @property
    def objective_m(self) -> float:
        return round(self.objective / 10, 2)


def solve_exact(orders: Sequence[Order], capacity: int, warehouse=None,
                part_distance: Callable[[frozenset[int]], int] | None = None,
                max_orders: int = DEFAULT_MAX_ORDERS, exact_bound: int = DEFAULT_EXACT_BOUND,
                memoize: bool = True) -> OracleResult:
    """Minimum total route length over all capacity-feasible partitions.

    Part lengths come from ``part_distance`` (a function of the part's order
    ids, used to inject known distances) or, by default, from optimal routes
    on ``warehouse``.
    """
    orders = list(orders)
    if len(orders) > max_orders:
        raise CapabilityError(f"{len(orders)} orders exceed the oracle bound of {max_orders}")
    by_id = {o.order_id: o for o in orders}
    weight = {o.order_id: o.weight for o in orders}

    router = None
    if part_distance is None:
        if warehouse is None:
            raise ValueError("need a warehouse or a part_distance function")
        router = OptimalRouter(warehouse, max_picks=exact_bound)

    memo: dict[frozenset[int], tuple[int, Route | None]] = {}

    def cost(part: frozenset[int]):
        if memoize and part in memo:
            return memo[part]
        if router is not None:
            picks = frozenset(warehouse.locate(p) for oid in part for p in by_id[oid].picks)
            route = router.route(picks)
            value = (route.length, route)
        else:
            value = (part_distance(part), None)
        memo[part] = value
        return value

    best = None
    enumerated = feasible = 0
    for partition in set_partitions([o.order_id for o in orders]):
        enumerated += 1
        parts = [frozenset(p) for p in partition]
        if any(sum(weight[i] for i in p) > capacity for p in parts):
            continue
        feasible += 1
        total = sum(cost(p)[0] for p in parts)
        if best is None or total < best[0]:
            best = (total, parts)

    if best is None:
        raise ValueError("no feasible partition: some order exceeds the capacity")
    total, parts = best
    return OracleResult(parts, {p: memo[p][1] for p in parts}, total, enumerated, feasible)
