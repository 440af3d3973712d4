from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence

from ..warehouse import ShortestPathCache, WarehouseGraph, shortest_path_to_all_nodes


class CapabilityError(RuntimeError):
    """A router or solver was asked for an instance beyond its configured bound."""


@dataclass(frozen=True)
class PickSet:
    nodes: frozenset[int]
    orders: tuple = ()

    @classmethod
    def of(cls, nodes: Iterable[int], orders: Iterable = ()):
        return cls(frozenset(nodes), tuple(orders))

    def __len__(self):
        return len(self.nodes)

    def __iter__(self):
        return iter(sorted(self.nodes))


@dataclass(frozen=True)
class Route:
    """Closed walk from the depot back to the depot.

    ``length`` is in decimeters; ``meters`` gives the reported value.
    """
    node_sequence: tuple[int, ...]
    length: int
    picks: frozenset[int] = field(default=frozenset(), compare=False)

    @property
    def meters(self) -> float:
        return round(self.length / 10, 2)

    def write(self, fh: IO[str]):
        for node in self.node_sequence:
            fh.write(f"{node}\n")
        fh.write(f"distance {self.meters:.2f}\n")


def traverse(targets: Sequence[int], graph: WarehouseGraph,
             cache: ShortestPathCache | None = None, picks: Iterable[int] = ()) -> Route:
    """Stitch shortest paths through ``targets``, starting and ending at the depot."""
    cache = cache if cache is not None else graph.cache
    depot = graph.depot
    seq = list(targets)
    for node in seq:
        if node not in graph.graph:
            raise KeyError(f"unknown node {node}")
    if not seq or seq[0] != depot:
        seq.insert(0, depot)
    if seq[-1] != depot:
        seq.append(depot)

    walk = [depot]
    length = 0
    for target in seq[1:]:
        lengths, paths = shortest_path_to_all_nodes(walk[-1], cache, graph.graph)
        walk += paths[target][1:]
        length += lengths[target]
    return Route(tuple(walk), length, frozenset(picks))


def walk_length(route_nodes: Sequence[int], graph: WarehouseGraph) -> int:
    """Re-sum edge lengths along a node sequence; fails on a non-edge step."""
    return sum(graph.edge_length(u, v) for u, v in zip(route_nodes, route_nodes[1:]))


class Router:
    """Maps a set of pick locations to a depot-to-depot route."""

    name = "router"

    def __init__(self, warehouse: WarehouseGraph, cache: ShortestPathCache | None = None):
        self.warehouse = warehouse
        self.cache = cache if cache is not None else warehouse.cache

    def route(self, picks: Iterable[int] | PickSet) -> Route:
        nodes = picks.nodes if isinstance(picks, PickSet) else frozenset(picks)
        for node in nodes:
            if not self.warehouse.is_pick(node):
                raise ValueError(f"node {node} is not a pick location")
        if not nodes:
            return Route((self.warehouse.depot,), 0, nodes)
        return traverse(self.sequence(nodes), self.warehouse, self.cache, nodes)

    def sequence(self, picks: frozenset[int]) -> list[int]:
        """Target nodes to visit in order; the depot ends are implied."""
        raise NotImplementedError

    # shared helpers

    def dist(self, u: int, v: int) -> int:
        return shortest_path_to_all_nodes(u, self.cache, self.warehouse.graph)[0][v]

    def path(self, u: int, v: int) -> list[int]:
        return shortest_path_to_all_nodes(u, self.cache, self.warehouse.graph)[1][v]

    def __repr__(self):
        return f"{type(self).__name__}()"


def routes_geojson(warehouse: WarehouseGraph, routes: dict[str, Route]) -> dict:
    """Node coordinates (meters) and one polyline per route, for external plotting."""
    nodes = {
        str(n): {"kind": warehouse.kind(n), "x": warehouse.position(n)[0] / 10,
                 "y": warehouse.position(n)[1] / 10}
        for n in sorted(warehouse.graph.nodes)
    }
    return {
        "nodes": nodes,
        "routes": {
            name: {
                "distance_m": r.meters,
                "nodes": list(r.node_sequence),
                "polyline": [[warehouse.position(n)[0] / 10, warehouse.position(n)[1] / 10]
                             for n in r.node_sequence],
            }
            for name, r in routes.items()
        },
    }


def dump_routes_json(fh: IO[str], warehouse: WarehouseGraph, routes: dict[str, Route]):
    json.dump(routes_geojson(warehouse, routes), fh, indent=1)
