"""Delay-constrained ADH: least-cost ADH tree repaired with least-delay paths."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

from .adh import adh_tree, root_tree
from .graph import (
    InvalidPathError,
    MulticastRequest,
    Network,
    NodeId,
    RoutedTree,
    prune_leaves,
)
from .shortest_paths import extract_path, least_delay_tree


@dataclass(frozen=True)
class DcadhStats:
    iterations: int = 0
    merged_paths: int = 0
    loop_repairs: int = 0


@dataclass(frozen=True)
class DcadhResult:
    tree: RoutedTree | None
    stats: DcadhStats

    @property
    def feasible(self) -> bool:
        return self.tree is not None


@dataclass(frozen=True)
class LoopCleanup:
    parent: dict[NodeId, NodeId]
    stranded: frozenset[NodeId]
    cycles_broken: int
    reattached: int


def changed_fathers(tree: RoutedTree, path: tuple[NodeId, ...]) -> list[NodeId]:
    """On-tree nodes of ``path`` whose father would change if it were merged.

    Each one marks a loop closed by the path together with the tree.
    """
    return [v for p, v in zip(path, path[1:]) if v in tree.parent and tree.parent[v] != p]


def eliminate_loops(
    net: Network,
    root: NodeId,
    parent: Mapping[NodeId, NodeId],
    keep: Iterable[NodeId],
    preferred: Iterable[NodeId] = (),
) -> LoopCleanup:
    """Give every node one father on a chain to ``root``.

    A cycle is cut at its first node (by id) whose father is not in
    ``preferred``; nodes cut off from the root are re-fathered to the
    reachable network neighbour offering the smallest root delay. Fragments
    that cannot be re-attached are dropped and their ``keep`` nodes reported
    as stranded. Finally childless nodes outside ``keep`` are pruned.
    """
    parent = {v: p for v, p in parent.items() if v != root}
    keep = set(keep)
    preferred = set(preferred)

    cycles = 0
    state: dict[NodeId, int] = {root: 2}  # 1 = on current walk, 2 = resolved
    for start in sorted(parent):
        walk = []
        v = start
        while v not in state and v in parent:
            state[v] = 1
            walk.append(v)
            v = parent[v]
        if state.get(v) == 1:
            ring = walk[walk.index(v):]
            stale = [u for u in sorted(ring) if u not in preferred]
            del parent[(stale or sorted(ring))[0]]
            cycles += 1
        for u in walk:
            state[u] = 2

    reattached = 0
    stranded: set[NodeId] = set()
    nodes = {root, *parent, *parent.values()}
    while True:
        delay = _rooted_delays(net, root, parent)
        loose = sorted(v for v in nodes if v not in delay)
        if not loose:
            break
        best = None
        for h in loose:
            if h in parent:
                continue
            for u, attr in net.neighbors(h).items():
                if u in delay:
                    cand = (delay[u] + attr.delay, h, u)
                    if best is None or cand < best:
                        best = cand
        if best is None:
            for v in loose:
                parent.pop(v, None)
            stranded = keep.intersection(loose)
            break
        _, h, u = best
        parent[h] = u
        reattached += 1

    prune_leaves(parent, keep)
    return LoopCleanup(parent, frozenset(stranded), cycles, reattached)


def _rooted_delays(net: Network, root: NodeId, parent: Mapping[NodeId, NodeId]) -> dict[NodeId, float]:
    """Root delays for the nodes whose father chain reaches ``root``."""
    delay = {root: 0.0}
    for start in parent:
        chain = []
        v = start
        while v not in delay and v in parent and len(chain) <= len(parent):
            chain.append(v)
            v = parent[v]
        if v not in delay:
            continue
        d = delay[v]
        for u in reversed(chain):
            d = d + net.edge(parent[u], u).delay
            delay[u] = d
    return delay


def merge_delay_path(
    tree: RoutedTree,
    path: tuple[NodeId, ...],
    net: Network,
    destinations: Iterable[NodeId] | None = None,
) -> RoutedTree:
    """Re-father every node of ``path`` to its predecessor on the path.

    ``path`` must start at the tree root. Nodes new to the tree join it;
    afterwards loops are eliminated and non-``destinations`` leaves pruned
    (leaves are kept when ``destinations`` is None).
    """
    if not path or path[0] != tree.root:
        raise InvalidPathError(f"path must start at tree root {tree.root}")
    for u, v in zip(path, path[1:]):
        if not net.has_edge(u, v):
            raise InvalidPathError(f"({u}, {v}) is not an edge")
    if not changed_fathers(tree, path) and all(v in tree for v in path):
        return tree

    parent = dict(tree.parent)
    for p, v in zip(path, path[1:]):
        parent[v] = p
    keep = set(tree.nodes()) if destinations is None else set(destinations)
    keep.add(path[-1])
    cleaned = eliminate_loops(net, tree.root, parent, keep, preferred=path[1:])
    return RoutedTree.from_parents(net, tree.root, cleaned.parent)


def dcadh(net: Network, req: MulticastRequest) -> DcadhResult:
    req.check(net)
    spt, feasible = least_delay_tree(net, req)
    if not feasible:
        return DcadhResult(None, DcadhStats())

    tree = root_tree(net, adh_tree(net, req.terminals), req.source)
    dests = sorted(req.destinations)
    bound = req.delay_bound
    iterations = merged = repairs = 0
    while True:
        touched = False
        for m in dests:
            if tree.node_delay.get(m, math.inf) <= bound:
                continue
            path = extract_path(spt, m)
            repairs += len(changed_fathers(tree, path))
            tree = merge_delay_path(tree, path, net, req.destinations)
            merged += 1
            touched = True
        if not touched:
            break
        iterations += 1
        if iterations > len(dests):
            raise RuntimeError("delay repair did not converge")
    return DcadhResult(tree, DcadhStats(iterations, merged, repairs))
