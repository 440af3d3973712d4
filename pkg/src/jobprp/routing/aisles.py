"""S-shape and Largest Gap routing for multi-block warehouses.

Both routers handle blocks from the one farthest from the depot towards the
depot. The opening leg is shared: walk to the front of the nearer of the
leftmost/rightmost picked subaisle in the farthest block and up to its
deepest pick, collecting every pick passed on the way.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

from ..warehouse import Subaisle
from .base import Router

FRONT, BACK, SPLIT = "front", "back", "split"


@dataclass
class BlockStep:
    subaisle: Subaisle
    walk: tuple[int, ...]
    full: bool


@dataclass
class HalfBlockPartition:
    """Fragments of one block, each entered and left through the same cross-aisle."""
    block_index: int
    front: list[tuple[int, ...]] = field(default_factory=list)
    back: list[tuple[int, ...]] = field(default_factory=list)
    modes: dict[int, str] = field(default_factory=dict)  # aisle index -> FRONT/BACK/SPLIT


class _BlockRouter(Router):

    def grouped(self, picks) -> dict[int, dict[Subaisle, list[int]]]:
        """block index -> subaisle -> its picks ordered back-to-front."""
        blocks: dict[int, dict[Subaisle, list[int]]] = defaultdict(dict)
        for sa in {self.warehouse.subaisle_of(p) for p in picks}:
            blocks[sa.block_index][sa] = [p for p in sa.pick_nodes if p in picks]
        return blocks

    def _nearer_end(self, current: int, ordered: list, entry) -> list:
        """Reverse ``ordered`` when its last element's entry node is strictly closer."""
        if len(ordered) > 1 and self.dist(current, entry(ordered[-1])) < self.dist(current, entry(ordered[0])):
            ordered = ordered[::-1]
        return ordered

    def opening_leg(self, picks) -> tuple[list[int], dict[int, dict[Subaisle, list[int]]]]:
        """Opening path and the blocks still holding picks, farthest block first."""
        depot = self.warehouse.depot
        blocks = self.grouped(picks)
        farthest = max(blocks)
        candidates = sorted(blocks[farthest], key=lambda sa: sa.aisle_index)
        first = self._nearer_end(depot, candidates, lambda sa: sa.front_node)[0]
        deepest = blocks[farthest][first][0]
        leg = self.path(depot, first.front_node) + self.path(first.front_node, deepest)[1:]

        on_leg = set(leg)
        remaining = {}
        for b in sorted(blocks, reverse=True):
            left = {}
            for sa in sorted(blocks[b], key=lambda sa: sa.aisle_index):
                rest = [p for p in blocks[b][sa] if p not in on_leg]
                if rest:
                    left[sa] = rest
            if left:
                remaining[b] = left
        return leg, remaining


class SShapeRouter(_BlockRouter):
    """Traverse every picked subaisle entirely, alternating direction.

    Within a block the picker starts at the back cross-aisle. The last
    subaisle visited in a block is entered only as far as its last pick in
    the walking direction; the next leg leaves by the nearest way.
    """

    name = "ss"

    def plan(self, picks) -> tuple[list[int], list[list[BlockStep]]]:
        leg, blocks = self.opening_leg(picks)
        current = leg[-1]
        steps = []
        for _, subaisles in blocks.items():
            order = self._nearer_end(current, list(subaisles), lambda sa: sa.back_node)
            block_steps = []
            for i, sa in enumerate(order):
                back_to_front = i % 2 == 0
                walk = list(sa.nodes) if back_to_front else list(reversed(sa.nodes))
                full = i < len(order) - 1
                if not full:
                    in_sa = subaisles[sa]
                    last = in_sa[-1] if back_to_front else in_sa[0]
                    walk = walk[:walk.index(last) + 1]
                block_steps.append(BlockStep(sa, tuple(walk), full))
            current = block_steps[-1].walk[-1]
            steps.append(block_steps)
        return leg, steps

    def sequence(self, picks):
        leg, steps = self.plan(picks)
        seq = list(leg)
        for block_steps in steps:
            for step in block_steps:
                seq += step.walk
        return seq


def service_costs(chain_offsets: dict[int, int], length: int, picks_front_to_back: list[int]):
    """Round-trip costs ``(d1, d2, d3, split_index)`` for one subaisle.

    ``chain_offsets`` maps nodes to their distance from the front cross-aisle
    node, ``length`` is the front-to-back subaisle length. ``d1`` serves all
    picks from the front, ``d2`` from the back, ``d3`` splits at the largest
    gap between adjacent picks (``None`` with a single pick). ``split_index``
    is the last pick index served from the front when splitting.
    """
    offs = [chain_offsets[p] for p in picks_front_to_back]
    d1 = 2 * offs[-1]
    d2 = 2 * (length - offs[0])
    if len(offs) < 2:
        return d1, d2, None, None
    gaps = [b - a for a, b in zip(offs, offs[1:])]
    widest = max(gaps)
    split_index = gaps.index(widest)
    return d1, d2, 2 * (length - widest), split_index


class LargestGapRouter(_BlockRouter):
    """Serve each block as a back half-block then a front half-block.

    Each picked subaisle is served from the front, from the back, or split at
    its largest gap, whichever round trip is shortest (ties prefer front,
    then back).
    """

    name = "lg"

    def _offsets(self, sa: Subaisle) -> tuple[dict[int, int], int]:
        chain = list(reversed(sa.nodes))  # front to back
        offsets = {chain[0]: 0}
        for u, v in zip(chain, chain[1:]):
            offsets[v] = offsets[u] + self.warehouse.edge_length(u, v)
        return offsets, offsets[chain[-1]]

    def partition(self, block_index: int, subaisles: dict[Subaisle, list[int]]) -> HalfBlockPartition:
        part = HalfBlockPartition(block_index)
        for sa in sorted(subaisles, key=lambda sa: sa.aisle_index):
            ps = subaisles[sa][::-1]
            offsets, length = self._offsets(sa)
            d1, d2, d3, k = service_costs(offsets, length, ps)
            if d1 <= d2 and (d3 is None or d1 <= d3):
                part.front.append((sa.front_node, *ps))
                part.modes[sa.aisle_index] = FRONT
            elif d3 is None or d2 <= d3:
                part.back.append((sa.back_node, *ps[::-1]))
                part.modes[sa.aisle_index] = BACK
            else:
                part.front.append((sa.front_node, *ps[:k + 1]))
                part.back.append((sa.back_node, *ps[k + 1:][::-1]))
                part.modes[sa.aisle_index] = SPLIT
        return part

    def plan(self, picks) -> tuple[list[int], list[HalfBlockPartition]]:
        leg, blocks = self.opening_leg(picks)
        return leg, [self.partition(b, sas) for b, sas in blocks.items()]

    def sequence(self, picks):
        leg, parts = self.plan(picks)
        seq = list(leg)
        for part in parts:
            for half in (part.back, part.front):
                if not half:
                    continue
                # entry nodes only order the fragments; legs between picks stay shortest paths
                for fragment in self._nearer_end(seq[-1], list(half), lambda f: f[0]):
                    seq += fragment[1:]
        return seq
