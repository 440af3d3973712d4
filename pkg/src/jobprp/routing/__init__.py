"""Picker routers: Nearest Neighbor, S-shape, Largest Gap and exact (optimal)."""
from .aisles import HalfBlockPartition, LargestGapRouter, SShapeRouter, service_costs
from .base import CapabilityError, PickSet, Route, Router, dump_routes_json, traverse, walk_length
from .nearest_neighbor import NearestNeighborRouter
from .optimal import DEFAULT_EXACT_BOUND, OptimalRouter, held_karp

ROUTERS = {
    "nn": NearestNeighborRouter,
    "ss": SShapeRouter,
    "lg": LargestGapRouter,
    "opt": OptimalRouter,
}
HEURISTICS = ("nn", "ss", "lg")


def make_router(name: str, warehouse, cache=None, **kwargs) -> Router:
    try:
        cls = ROUTERS[name]
    except KeyError:
        raise ValueError(f"unknown router {name!r}; choose from {sorted(ROUTERS)}") from None
    return cls(warehouse, cache, **kwargs)


__all__ = [
    "CapabilityError", "DEFAULT_EXACT_BOUND", "HEURISTICS", "HalfBlockPartition",
    "LargestGapRouter", "NearestNeighborRouter", "OptimalRouter", "PickSet", "ROUTERS",
    "Route", "Router", "SShapeRouter", "dump_routes_json", "held_karp", "make_router",
    "service_costs", "traverse", "walk_length",
]
