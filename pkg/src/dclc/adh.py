"""Average distance heuristic for least-cost Steiner trees.

Every terminal starts as its own component. Each round scores every node
``v`` by the sum of its least-cost distances to the two nearest components
and joins those two components through the best ``v``, until one remains.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

from .graph import Network, NodeId, RoutedTree, prune_leaves
from .shortest_paths import Metric, SpTree, extract_path, nearest_to_set

Edge = tuple[NodeId, NodeId]


def _key(u: NodeId, v: NodeId) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass
class Component:
    nodes: frozenset[NodeId]
    edges: frozenset[Edge]
    reach: SpTree = field(repr=False)


class Forest:
    """Disjoint partial trees with cached least-cost distance maps."""

    def __init__(self, net: Network, terminals: Iterable[NodeId]):
        self.net = net
        self.components: dict[int, Component] = {}
        self.owner: dict[NodeId, int] = {}
        for cid, t in enumerate(sorted(set(terminals))):
            self._put(cid, frozenset([t]), frozenset())

    def _put(self, cid: int, nodes: frozenset[NodeId], edges: frozenset[Edge]) -> None:
        self.components[cid] = Component(nodes, edges, nearest_to_set(self.net, nodes, Metric.COST))
        for v in nodes:
            self.owner[v] = cid

    @property
    def k(self) -> int:
        return len(self.components)

    def distance(self, v: NodeId, cid: int) -> float:
        return self.components[cid].reach.dist.get(v, float("inf"))

    def path_into(self, v: NodeId, cid: int) -> tuple[NodeId, ...]:
        """Least-cost path starting at ``v`` and ending at the first node of component ``cid``."""
        return tuple(reversed(extract_path(self.components[cid].reach, v)))

    def merge(self, v: NodeId, i: int, j: int) -> list[int]:
        """Join components ``i`` and ``j`` through ``v``; returns the ids absorbed.

        Path edges already present are ignored and edges that would close a
        cycle are skipped. A component touched by a splice path is absorbed too.
        """
        paths = [self.path_into(v, i), self.path_into(v, j)]
        touched = {i, j}
        for p in paths:
            touched.update(self.owner[u] for u in p if u in self.owner)
        ids = sorted(touched)

        uf: dict[NodeId, NodeId] = {}

        def find(x: NodeId) -> NodeId:
            uf.setdefault(x, x)
            while uf[x] != x:
                uf[x] = uf[uf[x]]
                x = uf[x]
            return x

        nodes: set[NodeId] = set()
        edges: set[Edge] = set()
        for cid in ids:
            comp = self.components[cid]
            nodes |= comp.nodes
            edges |= comp.edges
            for a, b in comp.edges:
                uf[find(a)] = find(b)
        for p in paths:
            nodes.update(p)
            for a, b in zip(p, p[1:]):
                ra, rb = find(a), find(b)
                if ra != rb:
                    uf[ra] = rb
                    edges.add(_key(a, b))

        for cid in ids:
            del self.components[cid]
        self._put(ids[0], frozenset(nodes), frozenset(edges))
        return ids[1:]


def merge_score(net: Network, v: NodeId, forest: Forest) -> tuple[float, int, int]:
    """Smallest ``d(v, Vi) + d(v, Vj)`` over component pairs, with the pair (i < j).

    ``net`` is the graph the forest's distances were computed on.
    """
    if forest.k < 2:
        raise ValueError("need at least two components")
    ranked = sorted((forest.distance(v, cid), cid) for cid in forest.components)
    (d1, c1), (d2, c2) = ranked[0], ranked[1]
    return d1 + d2, min(c1, c2), max(c1, c2)


@dataclass(frozen=True)
class AdhTree:
    terminals: frozenset[NodeId]
    nodes: frozenset[NodeId]
    edges: frozenset[Edge]
    iterations: int

    def cost(self, net: Network) -> float:
        return sum(net.edge(u, v).cost for u, v in sorted(self.edges))


def adh_tree(net: Network, terminals: Iterable[NodeId]) -> AdhTree:
    terminals = frozenset(terminals)
    if not terminals:
        raise ValueError("terminal set must be nonempty")
    forest = Forest(net, terminals)
    iterations = 0
    while forest.k > 1:
        best: tuple[float, NodeId, int, int] | None = None
        for v in net.nodes():
            score, i, j = merge_score(net, v, forest)
            cand = (score, v, i, j)
            if best is None or cand < best:
                best = cand
        assert best is not None
        if best[0] == float("inf"):
            raise ValueError("terminals are not mutually reachable")
        _, v, i, j = best
        forest.merge(v, i, j)
        iterations += 1

    (comp,) = forest.components.values()
    nodes, edges = _prune(comp.nodes, comp.edges, terminals)
    return AdhTree(terminals, nodes, edges, iterations)


def _prune(
    nodes: frozenset[NodeId], edges: frozenset[Edge], keep: frozenset[NodeId]
) -> tuple[frozenset[NodeId], frozenset[Edge]]:
    adj: dict[NodeId, set[NodeId]] = {v: set() for v in nodes}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    stack = [v for v in nodes if len(adj[v]) <= 1 and v not in keep]
    while stack:
        v = stack.pop()
        if v not in adj:
            continue
        for u in adj.pop(v):
            adj[u].discard(v)
            if len(adj[u]) <= 1 and u not in keep:
                stack.append(u)
    live = frozenset(adj)
    return live, frozenset(e for e in edges if e[0] in live and e[1] in live)


def root_tree(net: Network, tree: AdhTree, root: NodeId) -> RoutedTree:
    """Orient the tree's edges away from ``root`` and drop non-terminal leaves."""
    if root not in tree.nodes:
        raise ValueError(f"root {root} not in tree")
    adj: dict[NodeId, list[NodeId]] = {v: [] for v in tree.nodes}
    for a, b in tree.edges:
        adj[a].append(b)
        adj[b].append(a)
    parent: dict[NodeId, NodeId] = {}
    seen = {root}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for w in sorted(adj[u]):
            if w not in seen:
                seen.add(w)
                parent[w] = u
                queue.append(w)
    prune_leaves(parent, tree.terminals)
    return RoutedTree.from_parents(net, root, parent)
