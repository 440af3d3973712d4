"""Exact picker routing: Held-Karp over the metric closure of the picks."""
from __future__ import annotations

import numpy as np

from .base import CapabilityError, Router

DEFAULT_EXACT_BOUND = 18


def held_karp(dist) -> tuple[list[int], int]:
    """Minimum closed tour from node 0 through every other node of ``dist``.

    Returns ``(order, length)`` where ``order`` lists the nodes 1..n-1 in
    visiting order. Ties resolve towards lower indices.
    """
    dist = np.asarray(dist, dtype=np.int64)
    m = dist.shape[0]
    n = m - 1
    if n == 0:
        return [], 0
    if n == 1:
        return [1], int(dist[0, 1] + dist[1, 0])

    inner = dist[1:, 1:]
    full = 1 << n
    inf = np.int64(1) << 60
    cost = np.full((full, n), inf, dtype=np.int64)
    parent = np.full((full, n), -1, dtype=np.int16)
    for j in range(n):
        cost[1 << j, j] = dist[0, j + 1]

    masks = np.arange(full, dtype=np.int64)
    popcount = np.zeros(full, dtype=np.int64)
    for b in range(n):
        popcount += (masks >> b) & 1

    for size in range(2, n + 1):
        layer = masks[popcount == size]
        for j in range(n):
            sub = layer[((layer >> j) & 1) == 1]
            prev = sub ^ (1 << j)
            cand = cost[prev] + inner[:, j]
            best = np.argmin(cand, axis=1)
            cost[sub, j] = cand[np.arange(len(sub)), best]
            parent[sub, j] = best

    closing = cost[full - 1] + dist[1:, 0]
    last = int(np.argmin(closing))
    length = int(closing[last])

    order = []
    mask = full - 1
    while last >= 0:
        order.append(last + 1)
        prev_last = int(parent[mask, last])
        mask ^= 1 << last
        last = prev_last
    order.reverse()
    return order, length


class OptimalRouter(Router):
    """Shortest possible tour through the picks, by dynamic programming over subsets.

    Instances above ``max_picks`` raise :class:`CapabilityError` instead of
    falling back to an approximation.
    """

    name = "opt"

    def __init__(self, warehouse, cache=None, max_picks: int = DEFAULT_EXACT_BOUND):
        super().__init__(warehouse, cache)
        self.max_picks = max_picks

    def sequence(self, picks):
        if len(picks) > self.max_picks:
            raise CapabilityError(
                f"{len(picks)} picks exceed the exact routing bound of {self.max_picks}"
            )
        nodes = [self.warehouse.depot, *sorted(picks)]
        dist = [[self.dist(u, v) for v in nodes] for u in nodes]
        order, _ = held_karp(dist)
        return [nodes[i] for i in order]
