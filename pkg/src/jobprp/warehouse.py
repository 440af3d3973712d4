"""Rectangular multi-block warehouse layouts and their graph representation.

Lengths are held as integer decimeters throughout so that route distances
compare exactly. Configuration widths are given in meters.

Node numbering (deterministic):

* depot is node 1
* pick-location nodes follow, aisle-major, front-to-back within an aisle
* artificial (aisle/cross-aisle junction) nodes come last, cross-aisle-major,
  front cross-aisle first, aisles left to right
"""
from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal
from typing import IO, Iterable, Sequence

import networkx as nx

DEPOT = "depot"
PICK = "pick"
ARTIFICIAL = "artificial"

#: default geometry, meters
DEFAULT_AISLE_WIDTH = 3.0
DEFAULT_CROSS_AISLE_WIDTH = 3.0
DEFAULT_SLOT_WIDTH = 1.0
DEFAULT_RACK_DEPTH = 1.0
DEFAULT_DEPOT_OFFSET = 4.0


def to_decimeters(meters: float | str | Decimal) -> int:
    """Convert a length in meters to whole decimeters, rejecting finer values."""
    dm = Decimal(str(meters)) * 10
    if dm != dm.to_integral_value():
        raise ValueError(f"length {meters} m is not a whole number of decimeters")
    return int(dm)


@dataclass(frozen=True)
class WarehouseConfig:
    num_aisles: int
    num_cross_aisles: int
    num_shelves: int
    min_products: int
    aisle_width: float = DEFAULT_AISLE_WIDTH
    cross_aisle_width: float = DEFAULT_CROSS_AISLE_WIDTH
    slot_width: float = DEFAULT_SLOT_WIDTH
    rack_depth: float = DEFAULT_RACK_DEPTH
    depot_offset: float = DEFAULT_DEPOT_OFFSET
    # aisle whose front artificial vertex the depot attaches to
    depot_aisle: int = 0
    max_locations_per_aisle: int | None = None

    def __post_init__(self):
        if self.num_aisles < 2:
            raise ValueError("num_aisles must be >= 2")
        if self.num_cross_aisles < 2:
            raise ValueError("num_cross_aisles must be >= 2 (front and back)")
        if self.num_shelves < 1:
            raise ValueError("num_shelves must be >= 1")
        if self.min_products < 1:
            raise ValueError("min_products must be >= 1")
        for name in ("aisle_width", "cross_aisle_width", "slot_width", "rack_depth", "depot_offset"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")
            to_decimeters(getattr(self, name))
        if not 0 <= self.depot_aisle < self.num_aisles:
            raise ValueError("depot_aisle out of range")

    @property
    def num_blocks(self) -> int:
        return self.num_cross_aisles - 1

    @property
    def slots_per_location(self) -> int:
        # both rack sides are reachable from one centerline location
        return 2 * self.num_shelves

    def locations_per_aisle(self) -> int:
        """Smallest n_l whose slot count holds ``min_products``."""
        per_depth = self.num_aisles * self.slots_per_location
        n_l = -(-self.min_products // per_depth)
        if self.max_locations_per_aisle is not None and n_l > self.max_locations_per_aisle:
            raise ValueError(
                f"{self.min_products} products need {n_l} locations per aisle side, "
                f"above the bound {self.max_locations_per_aisle}"
            )
        return n_l


_CONFIG_KEYS = {
    "na": "num_aisles",
    "nc": "num_cross_aisles",
    "ns": "num_shelves",
    "np": "min_products",
}
_INT_FIELDS = {"num_aisles", "num_cross_aisles", "num_shelves", "min_products",
               "depot_aisle", "max_locations_per_aisle"}


def parse_key_values(text: str) -> dict[str, str]:
    """Parse ``key=value`` lines; ``#`` comments and blank lines are skipped."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


def config_from_mapping(values: dict[str, str]) -> WarehouseConfig:
    kwargs = {}
    fields = WarehouseConfig.__dataclass_fields__
    for key, value in values.items():
        name = _CONFIG_KEYS.get(key, key)
        if name not in fields:
            continue
        kwargs[name] = int(value) if name in _INT_FIELDS else float(value)
    return WarehouseConfig(**kwargs)


def load_config(path) -> WarehouseConfig:
    with open(path, encoding="utf-8") as fh:
        return config_from_mapping(parse_key_values(fh.read()))


def block_sizes(locations_per_aisle: int, num_blocks: int) -> list[int]:
    """Pick locations per subaisle, front block first.

    The remainder of an uneven division goes one each to the blocks closest
    to the depot.
    """
    if locations_per_aisle < num_blocks:
        raise ValueError(
            f"{locations_per_aisle} locations per aisle cannot fill {num_blocks} blocks"
        )
    base, remainder = divmod(locations_per_aisle, num_blocks)
    return [base + 1 if i < remainder else base for i in range(num_blocks)]


@dataclass(frozen=True)
class Subaisle:
    """Section of one aisle inside one block.

    ``pick_nodes`` run from the back cross-aisle towards the front one, so
    ``[back_node, *pick_nodes, front_node]`` is a walk along the aisle.
    """
    back_node: int
    pick_nodes: tuple[int, ...]
    front_node: int
    aisle_index: int
    block_index: int

    @property
    def nodes(self) -> tuple[int, ...]:
        return (self.back_node, *self.pick_nodes, self.front_node)

    def __len__(self):
        return len(self.pick_nodes)


def generate_subaisles(
    num_blocks: int,
    aisles: Sequence[Sequence[int]],
    cross_aisle_nodes: Sequence[int],
) -> list[Subaisle]:
    """Split every aisle into ``num_blocks`` subaisles.

    ``aisles`` lists each aisle's pick nodes front-to-back; ``cross_aisle_nodes``
    is ordered cross-aisle-major (front cross-aisle first, aisles left to right).
    Subaisles are returned aisle-major, front block first.
    """
    num_aisles = len(aisles)
    if len(cross_aisle_nodes) != num_aisles * (num_blocks + 1):
        raise ValueError(
            f"expected {num_aisles * (num_blocks + 1)} cross-aisle nodes, "
            f"got {len(cross_aisle_nodes)}"
        )
    lengths = {len(aisle) for aisle in aisles}
    if len(lengths) != 1:
        raise ValueError("all aisles must have the same number of pick locations")
    sizes = block_sizes(lengths.pop(), num_blocks)

    subaisles = []
    for a, aisle in enumerate(aisles):
        junctions = cross_aisle_nodes[a::num_aisles]
        pos = 0
        for b, size in enumerate(sizes):
            picks = aisle[pos:pos + size]
            subaisles.append(Subaisle(
                back_node=junctions[b + 1],
                pick_nodes=tuple(reversed(picks)),
                front_node=junctions[b],
                aisle_index=a,
                block_index=b,
            ))
            pos += size
    return subaisles


class ShortestPathCache:
    """Per-source memo of single-source shortest paths.

    Memory grows as O(|V|^2) once every source has been queried. Concurrent
    fills of the same source are idempotent: the first stored result wins.
    """

    def __init__(self):
        self._memo: dict[int, tuple[dict, dict]] = {}
        self.computations = 0

    def __contains__(self, source):
        return source in self._memo

    def __len__(self):
        return len(self._memo)

    def clear(self):
        self._memo.clear()


def shortest_path_to_all_nodes(source: int, cache: ShortestPathCache, graph: nx.Graph):
    """Return ``(lengths, paths)`` from ``source`` to every node, memoized."""
    hit = cache._memo.get(source)
    if hit is not None:
        return hit
    if source not in graph:
        raise KeyError(f"unknown node {source}")
    result = nx.single_source_dijkstra(graph, source, weight="weight")
    cache.computations += 1
    return cache._memo.setdefault(source, result)


@dataclass(frozen=True)
class Product:
    product_id: int
    categories: tuple[str, ...] = ()


class WarehouseGraph:
    """Warehouse layout as a weighted undirected graph plus slot bookkeeping."""

    depot = 1

    def __init__(self, config: WarehouseConfig):
        self.config = config
        self.locations_per_aisle = config.locations_per_aisle()
        self.block_sizes = block_sizes(self.locations_per_aisle, config.num_blocks)
        self.graph = nx.Graph()
        self.aisles: list[list[int]] = []
        self.cross_aisle_nodes: list[int] = []
        self.slot_assignment: list[int | None] = []
        self.product_location: dict[int, int] = {}
        self._build()
        self.subaisles = generate_subaisles(config.num_blocks, self.aisles, self.cross_aisle_nodes)
        self._subaisle_of = {p: sa for sa in self.subaisles for p in sa.pick_nodes}
        self.cache = ShortestPathCache()

    def _build(self):
        cfg = self.config
        n_a, n_l = cfg.num_aisles, self.locations_per_aisle
        slot = to_decimeters(cfg.slot_width)
        pitch = to_decimeters(cfg.aisle_width) + 2 * to_decimeters(cfg.rack_depth)
        # centerline of a cross-aisle to the centre of the adjacent slot
        junction = (to_decimeters(cfg.cross_aisle_width) + slot + 1) // 2
        depot_offset = to_decimeters(cfg.depot_offset)

        g = self.graph
        first_artificial = 2 + n_a * n_l

        def artificial(c, a):
            return first_artificial + c * n_a + a

        # y coordinate of each cross-aisle centerline and of each pick depth
        ca_y, depth_y = [0], []
        y = 0
        for size in self.block_sizes:
            y += junction
            for k in range(size):
                if k:
                    y += slot
                depth_y.append(y)
            y += junction
            ca_y.append(y)

        g.add_node(self.depot, kind=DEPOT, pos=(cfg.depot_aisle * pitch, -depot_offset))
        for a in range(n_a):
            aisle = [2 + a * n_l + k for k in range(n_l)]
            self.aisles.append(aisle)
            for k, node in enumerate(aisle):
                g.add_node(node, kind=PICK, pos=(a * pitch, depth_y[k]), aisle=a, depth=k)
        for c in range(cfg.num_cross_aisles):
            for a in range(n_a):
                node = artificial(c, a)
                self.cross_aisle_nodes.append(node)
                g.add_node(node, kind=ARTIFICIAL, pos=(a * pitch, ca_y[c]), aisle=a, cross_aisle=c)

        g.add_edge(self.depot, artificial(0, cfg.depot_aisle), weight=depot_offset)
        for c in range(cfg.num_cross_aisles):
            for a in range(n_a - 1):
                g.add_edge(artificial(c, a), artificial(c, a + 1), weight=pitch)
        for a, aisle in enumerate(self.aisles):
            pos = 0
            for b, size in enumerate(self.block_sizes):
                chain = [artificial(b, a), *aisle[pos:pos + size], artificial(b + 1, a)]
                for u, v in zip(chain, chain[1:]):
                    w = junction if g.nodes[u]["kind"] == ARTIFICIAL or g.nodes[v]["kind"] == ARTIFICIAL else slot
                    g.add_edge(u, v, weight=w)
                pos += size

    # --- structure -----------------------------------------------------

    @property
    def num_blocks(self) -> int:
        return self.config.num_blocks

    @property
    def num_slots(self) -> int:
        return self.config.num_aisles * self.locations_per_aisle * self.config.slots_per_location

    @property
    def pick_nodes(self) -> list[int]:
        return [node for aisle in self.aisles for node in aisle]

    def kind(self, node: int) -> str:
        return self.graph.nodes[node]["kind"]

    def is_pick(self, node: int) -> bool:
        return node in self.graph and self.graph.nodes[node]["kind"] == PICK

    def position(self, node: int) -> tuple[int, int]:
        """Node coordinates in decimeters."""
        return self.graph.nodes[node]["pos"]

    def subaisle_of(self, node: int) -> Subaisle:
        return self._subaisle_of[node]

    def slot_node(self, slot: int) -> int:
        return 2 + slot // self.config.slots_per_location

    # --- distances -----------------------------------------------------

    def shortest_paths_from(self, source: int, cache: ShortestPathCache | None = None):
        return shortest_path_to_all_nodes(source, cache or self.cache, self.graph)

    def distance(self, u: int, v: int, cache: ShortestPathCache | None = None) -> int:
        return self.shortest_paths_from(u, cache)[0][v]

    def path(self, u: int, v: int, cache: ShortestPathCache | None = None) -> list[int]:
        return self.shortest_paths_from(u, cache)[1][v]

    def edge_length(self, u: int, v: int) -> int:
        return self.graph.edges[u, v]["weight"]

    # --- products ------------------------------------------------------

    def locate(self, product_id: int) -> int:
        try:
            return self.product_location[product_id]
        except KeyError:
            raise KeyError(f"product {product_id} has no slot in this warehouse") from None

    def export_edges(self, fh: IO[str]):
        for u, v, w in sorted((min(u, v), max(u, v), d["weight"]) for u, v, d in self.graph.edges(data=True)):
            fh.write(f"{u} {v} {_fmt_m(w)}\n")

    def export_manifest(self, fh: IO[str]):
        for node in sorted(self.graph.nodes):
            x, y = self.position(node)
            fh.write(f"{node} {self.kind(node)} {_fmt_m(x)} {_fmt_m(y)}\n")


def _fmt_m(dm: int) -> str:
    return f"{dm / 10:g}"


def place_products(graph: WarehouseGraph, products: Iterable[Product]) -> list[int | None]:
    """Fill slots with products sorted by category levels, broadest level first.

    Products occupy a prefix of the slot order (pick nodes by id, then
    shelf/side within a node); the remaining slots stay empty. The result is
    also stored on ``graph``.
    """
    ordered = sorted(products, key=lambda p: (p.categories, p.product_id))
    if len(ordered) > graph.num_slots:
        raise ValueError(f"{len(ordered)} products do not fit in {graph.num_slots} slots")
    ids = [p.product_id for p in ordered]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate product ids")
    assignment: list[int | None] = ids + [None] * (graph.num_slots - len(ids))
    graph.slot_assignment = assignment
    graph.product_location = {pid: graph.slot_node(s) for s, pid in enumerate(ids)}
    return assignment


def load_products(path) -> list[Product]:
    """Read ``product_id,category1,category2,...`` lines."""
    products = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            fields = [f.strip() for f in line.split(",")]
            try:
                pid = int(fields[0])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: bad product id {fields[0]!r}") from None
            products.append(Product(pid, tuple(fields[1:])))
    return products


def generate_warehouse(config: WarehouseConfig, products: Iterable[Product] | None = None) -> WarehouseGraph:
    """Build the warehouse graph and place products.

    Without explicit ``products``, ids ``1..min_products`` are stored in id order.
    """
    wh = WarehouseGraph(config)
    if products is None:
        products = [Product(i) for i in range(1, config.min_products + 1)]
    place_products(wh, products)
    return wh

