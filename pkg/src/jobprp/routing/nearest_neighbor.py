from __future__ import annotations

from .base import Router


class NearestNeighborRouter(Router):
    """Greedy tour: always walk to the closest unpicked location.

    Equidistant candidates are resolved towards the smaller node id.
    """

    name = "nn"

    def sequence(self, picks):
        current = self.warehouse.depot
        unvisited = set(picks)
        order = []
        while unvisited:
            lengths = self.warehouse.shortest_paths_from(current, self.cache)[0]
            current = min(unvisited, key=lambda n: (lengths[n], n))
            unvisited.remove(current)
            order.append(current)
        return order
