"""Exhaustive exact solvers for small instances.

Neither solver touches the shortest-path or heuristic code, so they can
serve as ground truth for both.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from typing import Iterable

from .graph import MulticastRequest, Network, NodeId


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleBudget:
    max_nodes: int = 10
    max_edges: int = 20
    timeout_s: float = 30.0

    def check(self, net: Network) -> None:
        if net.n > self.max_nodes or net.num_edges > self.max_edges:
            raise BudgetExceeded(
                f"instance has {net.n} nodes / {net.num_edges} edges; "
                f"budget is {self.max_nodes} / {self.max_edges}"
            )


@dataclass(frozen=True)
class ExactTree:
    cost: float
    edges: frozenset[tuple[NodeId, NodeId]]
    # only set by exact_dclc
    parent: dict[NodeId, NodeId] | None = None


def _kruskal(nodes: set[NodeId], edges: list[tuple[float, NodeId, NodeId]]):
    uf = {v: v for v in nodes}

    def find(x):
        while uf[x] != x:
            uf[x] = uf[uf[x]]
            x = uf[x]
        return x

    chosen, total = [], 0.0
    for c, u, v in edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            uf[ru] = rv
            chosen.append((u, v))
            total += c
    if len(chosen) != len(nodes) - 1:
        return None
    return total, chosen


def exact_steiner(
    net: Network, terminals: Iterable[NodeId], budget: OracleBudget = OracleBudget()
) -> ExactTree:
    """Minimum-cost tree spanning ``terminals``.

    The optimal tree is a minimum spanning tree of the subgraph induced by
    its own node set, so minimising induced-subgraph MSTs over every set of
    optional nodes is exact.
    """
    budget.check(net)
    terms = set(terminals)
    if not terms:
        raise ValueError("terminal set must be nonempty")
    optional = [v for v in net.nodes() if v not in terms]
    all_edges = sorted((a.cost, u, v) for u, v, a in net.edges())
    deadline = time.monotonic() + budget.timeout_s

    best: ExactTree | None = None
    for r in range(len(optional) + 1):
        for extra in itertools.combinations(optional, r):
            if time.monotonic() > deadline:
                raise BudgetExceeded("exact_steiner timed out")
            nodes = terms.union(extra)
            sub = [e for e in all_edges if e[1] in nodes and e[2] in nodes]
            found = _kruskal(nodes, sub)
            if found is not None and (best is None or found[0] < best.cost):
                best = ExactTree(found[0], frozenset((min(u, v), max(u, v)) for u, v in found[1]))
    if best is None:
        raise ValueError("terminals are not connected")
    return best


def exact_dclc(
    net: Network, req: MulticastRequest, budget: OracleBudget = OracleBudget()
) -> ExactTree | None:
    """Cheapest source-rooted tree with every destination's delay within the bound.

    Enumerates every subtree containing the source exactly once by
    branching on frontier edges (take it, or ban it for the rest of the
    branch). A node's root delay is fixed when it joins, so branches that
    add a node beyond the bound or exceed the best cost are cut. Returns
    None when no tree satisfies the bound.
    """
    budget.check(net)
    req.check(net)
    bound = req.delay_bound
    dests = req.destinations
    deadline = time.monotonic() + budget.timeout_s
    best_cost = math.inf
    best_parent: dict[NodeId, NodeId] | None = None

    parent: dict[NodeId, NodeId] = {}
    delay = {req.source: 0.0}

    def frontier_of(v: NodeId, banned: frozenset) -> list[tuple[NodeId, NodeId]]:
        return [(v, w) for w in net.neighbors(v) if w not in delay and (v, w) not in banned]

    def grow(frontier: list[tuple[NodeId, NodeId]], banned: frozenset, cost: float, covered: int):
        nonlocal best_cost, best_parent
        if time.monotonic() > deadline:
            raise BudgetExceeded("exact_dclc timed out")
        if covered == len(dests):
            if cost < best_cost:
                best_cost, best_parent = cost, dict(parent)
            return
        frontier = [(u, w) for u, w in frontier if w not in delay]
        if not frontier:
            return
        (u, w), rest = frontier[0], frontier[1:]
        attr = net.edge(u, w)
        d = delay[u] + attr.delay
        if d <= bound and cost + attr.cost < best_cost:
            parent[w] = u
            delay[w] = d
            grow(rest + frontier_of(w, banned), banned, cost + attr.cost, covered + (w in dests))
            del parent[w], delay[w]
        grow(rest, banned | {(u, w), (w, u)}, cost, covered)

    grow(frontier_of(req.source, frozenset()), frozenset(), 0.0, 0)
    if best_parent is None:
        return None
    edges = frozenset((min(u, p), max(u, p)) for u, p in best_parent.items())
    return ExactTree(best_cost, edges, best_parent)
