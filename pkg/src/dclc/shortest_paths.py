"""Binary-heap Dijkstra over either link metric.

Ties are settled by smaller node id (heap order on ``(dist, node)``) and a
node keeps the first father that reached its final distance.
"""

from __future__ import annotations

import enum
import heapq
from dataclasses import dataclass
from typing import Iterable, Mapping

from .graph import EdgeAttr, MulticastRequest, Network, NodeId, Path, RoutedTree, prune_leaves


class Metric(enum.Enum):
    COST = "cost"
    DELAY = "delay"

    def __call__(self, attr: EdgeAttr) -> float:
        return attr.cost if self is Metric.COST else attr.delay


class UnreachedError(KeyError):
    pass


@dataclass(frozen=True)
class SpTree:
    """Shortest-path forest grown from ``sources`` (a single root for plain Dijkstra)."""

    sources: tuple[NodeId, ...]
    metric: Metric
    dist: Mapping[NodeId, float]
    parent: Mapping[NodeId, NodeId]

    @property
    def root(self) -> NodeId:
        if len(self.sources) != 1:
            raise ValueError("multi-source tree has no single root")
        return self.sources[0]


def _search(net: Network, sources: Iterable[NodeId], metric: Metric) -> SpTree:
    srcs = tuple(sorted(set(sources)))
    if not srcs:
        raise ValueError("at least one source required")
    dist: dict[NodeId, float] = {}
    parent: dict[NodeId, NodeId] = {}
    best = {s: 0.0 for s in srcs}
    heap = [(0.0, s) for s in srcs]
    heapq.heapify(heap)
    while heap:
        d, u = heapq.heappop(heap)
        if u in dist:
            continue
        dist[u] = d
        for v, attr in net.neighbors(u).items():
            if v in dist:
                continue
            nd = d + metric(attr)
            if v not in best or nd < best[v]:
                best[v] = nd
                parent[v] = u
                heapq.heappush(heap, (nd, v))
    return SpTree(srcs, metric, dist, parent)


def dijkstra(net: Network, root: NodeId, metric: Metric = Metric.COST) -> SpTree:
    if not 0 <= root < net.n:
        raise ValueError(f"root {root} not in network")
    return _search(net, (root,), metric)


def nearest_to_set(net: Network, members: Iterable[NodeId], metric: Metric = Metric.COST) -> SpTree:
    """Distance from every node to the closest node of ``members``.

    Following ``parent`` from any node walks a shortest path into the set.
    """
    return _search(net, members, metric)


def extract_path(spt: SpTree, target: NodeId) -> Path:
    """Source-first path from the tree's origin to ``target``."""
    if target not in spt.dist:
        raise UnreachedError(target)
    out = [target]
    while target in spt.parent:
        target = spt.parent[target]
        out.append(target)
    return tuple(reversed(out))


def least_delay_tree(net: Network, req: MulticastRequest) -> tuple[SpTree, bool]:
    spt = dijkstra(net, req.source, Metric.DELAY)
    feasible = all(d in spt.dist and spt.dist[d] <= req.delay_bound for d in req.destinations)
    return spt, feasible


def spt_routed_tree(net: Network, spt: SpTree, destinations: Iterable[NodeId]) -> RoutedTree:
    """The shortest-path tree restricted to the branches that serve ``destinations``."""
    parent: dict[NodeId, NodeId] = {}
    for d in sorted(destinations):
        v = d
        while v in spt.parent and v not in parent:
            parent[v] = spt.parent[v]
            v = parent[v]
    prune_leaves(parent, destinations)
    return RoutedTree.from_parents(net, spt.root, parent)
