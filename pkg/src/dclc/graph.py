"""Network, path and rooted-tree model shared by every routing algorithm.

Nodes are dense integer ids ``0..n-1``. Every undirected link carries a
``(cost, delay)`` pair; delay is in seconds.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence, TextIO

NodeId = int
Path = tuple[NodeId, ...]

DELAY_TOL = 1e-9
COST_TOL = 1e-9


class GraphError(ValueError):
    """Malformed network, path or tree."""


class InvalidPathError(GraphError):
    pass


class InvalidTreeError(GraphError):
    pass


class GraphFormatError(GraphError):
    """Raised by the graph file parser; carries the offending line number."""

    def __init__(self, message: str, lineno: int | None = None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno


@dataclass(frozen=True, slots=True)
class EdgeAttr:
    cost: float
    delay: float

    def __post_init__(self) -> None:
        if not (self.cost >= 0 and math.isfinite(self.cost)):
            raise GraphError(f"edge cost must be finite and >= 0, got {self.cost}")
        if not (self.delay >= 0 and math.isfinite(self.delay)):
            raise GraphError(f"edge delay must be finite and >= 0, got {self.delay}")


class Network:
    """Immutable undirected graph with planar node coordinates (km)."""

    __slots__ = ("_coords", "_adj", "_m")

    def __init__(
        self,
        coords: Sequence[tuple[float, float]],
        edges: Iterable[tuple[NodeId, NodeId, EdgeAttr]],
    ):
        n = len(coords)
        self._coords = tuple((float(x), float(y)) for x, y in coords)
        adj: list[dict[NodeId, EdgeAttr]] = [{} for _ in range(n)]
        m = 0
        for u, v, attr in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) references a node outside 0..{n - 1}")
            if u == v:
                raise GraphError(f"self-loop on node {u}")
            if v in adj[u]:
                raise GraphError(f"duplicate edge ({u}, {v})")
            adj[u][v] = attr
            adj[v][u] = attr
            m += 1
        self._adj = tuple(MappingProxyType(dict(sorted(a.items()))) for a in adj)
        self._m = m

    @property
    def n(self) -> int:
        return len(self._coords)

    @property
    def num_edges(self) -> int:
        return self._m

    def nodes(self) -> range:
        return range(self.n)

    def coord(self, v: NodeId) -> tuple[float, float]:
        return self._coords[v]

    @property
    def coords(self) -> tuple[tuple[float, float], ...]:
        return self._coords

    def neighbors(self, v: NodeId) -> Mapping[NodeId, EdgeAttr]:
        return self._adj[v]

    def has_edge(self, u: NodeId, v: NodeId) -> bool:
        return 0 <= u < self.n and v in self._adj[u]

    def edge(self, u: NodeId, v: NodeId) -> EdgeAttr:
        try:
            return self._adj[u][v]
        except (IndexError, KeyError):
            raise GraphError(f"no edge ({u}, {v})") from None

    def edges(self) -> Iterator[tuple[NodeId, NodeId, EdgeAttr]]:
        """Each undirected edge once, as ``(u, v, attr)`` with ``u < v``."""
        for u, nbrs in enumerate(self._adj):
            for v, attr in nbrs.items():
                if u < v:
                    yield u, v, attr

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        seen = {0}
        queue = deque([0])
        while queue:
            u = queue.popleft()
            for v in self._adj[u]:
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        return len(seen) == self.n

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Network):
            return NotImplemented
        return self._coords == other._coords and list(self.edges()) == list(other.edges())

    def __hash__(self) -> int:
        return hash((self._coords, tuple(self.edges())))

    def __repr__(self) -> str:
        return f"Network(n={self.n}, edges={self._m})"


@dataclass(frozen=True)
class MulticastRequest:
    source: NodeId
    destinations: frozenset[NodeId]
    delay_bound: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "destinations", frozenset(self.destinations))
        if not self.destinations:
            raise GraphError("destination set must be nonempty")
        if self.source in self.destinations:
            raise GraphError(f"source {self.source} must not be a destination")
        if not self.delay_bound > 0:
            raise GraphError(f"delay bound must be positive, got {self.delay_bound}")

    @property
    def terminals(self) -> frozenset[NodeId]:
        return self.destinations | {self.source}

    def check(self, net: Network) -> None:
        for v in self.terminals:
            if not 0 <= v < net.n:
                raise GraphError(f"node {v} not in network of {net.n} nodes")


def _path_edges(net: Network, path: Sequence[NodeId]) -> Iterator[EdgeAttr]:
    if not path:
        raise InvalidPathError("empty path")
    if len(set(path)) != len(path):
        raise InvalidPathError(f"path revisits a node: {tuple(path)}")
    for u, v in zip(path, path[1:]):
        if not net.has_edge(u, v):
            raise InvalidPathError(f"({u}, {v}) is not an edge")
        yield net.edge(u, v)


def path_cost(net: Network, path: Sequence[NodeId]) -> float:
    return sum(e.cost for e in _path_edges(net, path))


def path_delay(net: Network, path: Sequence[NodeId]) -> float:
    return sum(e.delay for e in _path_edges(net, path))


@dataclass(frozen=True, eq=False)
class RoutedTree:
    """Rooted tree stored as a father map plus accumulated root delays.

    Build through :meth:`from_parents`, which computes ``node_delay``.
    """

    root: NodeId
    parent: Mapping[NodeId, NodeId]
    node_delay: Mapping[NodeId, float] = field(repr=False)

    @classmethod
    def from_parents(
        cls, net: Network, root: NodeId, parent: Mapping[NodeId, NodeId]
    ) -> "RoutedTree":
        parent = dict(sorted(parent.items()))
        if root in parent:
            raise InvalidTreeError(f"root {root} has a father")
        delay = {root: 0.0}
        for v in parent:
            _accumulate(net, root, parent, delay, v)
        return cls(root, MappingProxyType(parent), MappingProxyType(delay))

    @classmethod
    def single(cls, root: NodeId) -> "RoutedTree":
        return cls(root, MappingProxyType({}), MappingProxyType({root: 0.0}))

    def nodes(self) -> set[NodeId]:
        return {self.root, *self.parent}

    def __contains__(self, v: object) -> bool:
        return v == self.root or v in self.parent

    def __len__(self) -> int:
        return len(self.parent) + 1

    def edges(self) -> set[tuple[NodeId, NodeId]]:
        """Undirected edge set, each as ``(min, max)``."""
        return {(min(u, p), max(u, p)) for u, p in self.parent.items()}

    def children(self) -> dict[NodeId, list[NodeId]]:
        kids: dict[NodeId, list[NodeId]] = {v: [] for v in self.nodes()}
        for v, p in self.parent.items():
            kids.setdefault(p, []).append(v)
        return kids

    def path_from_root(self, v: NodeId) -> Path:
        out = [v]
        while v != self.root:
            v = self.parent[v]
            out.append(v)
            if len(out) > len(self) + 1:
                raise InvalidTreeError("father chain does not reach the root")
        return tuple(reversed(out))

    def same_shape(self, other: "RoutedTree") -> bool:
        return self.root == other.root and dict(self.parent) == dict(other.parent)


def _accumulate(
    net: Network,
    root: NodeId,
    parent: Mapping[NodeId, NodeId],
    delay: dict[NodeId, float],
    v: NodeId,
) -> float:
    chain = []
    while v not in delay:
        chain.append(v)
        if len(chain) > len(parent):
            raise InvalidTreeError(f"father chain from {chain[0]} loops")
        try:
            v = parent[v]
        except KeyError:
            raise InvalidTreeError(f"node {v} is neither the root nor has a father") from None
    d = delay[v]
    for u in reversed(chain):
        p = parent[u]
        if not net.has_edge(p, u):
            raise InvalidTreeError(f"tree edge ({p}, {u}) is not in the network")
        d = d + net.edge(p, u).delay
        delay[u] = d
    return d


def tree_cost(tree: RoutedTree, net: Network) -> float:
    total = 0.0
    for u, v in sorted(tree.edges()):
        if not net.has_edge(u, v):
            raise InvalidTreeError(f"tree edge ({u}, {v}) is not in the network")
        total += net.edge(u, v).cost
    return total


def max_delay(tree: RoutedTree, destinations: Iterable[NodeId]) -> float:
    return max((tree.node_delay[d] for d in destinations), default=0.0)


@dataclass
class ValidationReport:
    acyclic: bool = True
    rooted_at_source: bool = True
    destinations_reach_root: bool = True
    delays_consistent: bool = True
    delay_bound_met: bool = True
    leaves_are_destinations: bool = True
    problems: list[str] = field(default_factory=list)

    FLAGS = (
        "acyclic",
        "rooted_at_source",
        "destinations_reach_root",
        "delays_consistent",
        "delay_bound_met",
        "leaves_are_destinations",
    )

    @property
    def ok(self) -> bool:
        return all(getattr(self, f) for f in self.FLAGS)

    def fail(self, flag: str, message: str) -> None:
        setattr(self, flag, False)
        self.problems.append(message)


def validate_tree(tree: RoutedTree, net: Network, req: MulticastRequest) -> ValidationReport:
    rep = ValidationReport()
    parent = dict(tree.parent)
    members = {tree.root, *parent}
    limit = len(members)

    reaches: dict[NodeId, bool] = {tree.root: True}
    for v in parent:
        u, steps, seen = v, 0, []
        while u not in reaches and steps <= limit:
            seen.append(u)
            if u not in parent:
                break
            u = parent[u]
            steps += 1
        ok = reaches.get(u, False)
        for w in seen:
            reaches[w] = ok
        if not ok:
            rep.fail("acyclic", f"father chain from {v} does not reach root {tree.root}")

    if tree.root != req.source or tree.root in parent:
        rep.fail("rooted_at_source", f"root is {tree.root}, source is {req.source}")

    for d in sorted(req.destinations):
        if d not in members or not reaches.get(d, False):
            rep.fail("destinations_reach_root", f"destination {d} not connected to root")

    nd = tree.node_delay
    if abs(nd.get(tree.root, math.nan)) > DELAY_TOL or set(nd) != members:
        rep.fail("delays_consistent", "node_delay keys or root delay wrong")
    for v, p in parent.items():
        if not net.has_edge(p, v):
            rep.fail("delays_consistent", f"tree edge ({p}, {v}) missing from network")
            continue
        if v in nd and p in nd and abs(nd[v] - nd[p] - net.edge(p, v).delay) > DELAY_TOL:
            rep.fail("delays_consistent", f"node_delay({v}) inconsistent with father {p}")

    for d in sorted(req.destinations):
        if d in nd and nd[d] > req.delay_bound + DELAY_TOL:
            rep.fail("delay_bound_met", f"destination {d} delay {nd[d]:.6g}s > bound")

    has_child = set(parent.values())
    for v in parent:
        if v not in has_child and v not in req.destinations:
            rep.fail("leaves_are_destinations", f"leaf {v} is not a destination")
    return rep


def prune_leaves(
    parent: dict[NodeId, NodeId], keep: Iterable[NodeId]
) -> dict[NodeId, NodeId]:
    """Repeatedly drop childless nodes that are not in ``keep``. Mutates ``parent``."""
    keep = set(keep)
    nchild: dict[NodeId, int] = {}
    for p in parent.values():
        nchild[p] = nchild.get(p, 0) + 1
    stack = [v for v in parent if nchild.get(v, 0) == 0 and v not in keep]
    while stack:
        v = stack.pop()
        p = parent.pop(v)
        nchild[p] -= 1
        if nchild[p] == 0 and p in parent and p not in keep:
            stack.append(p)
    return parent


# -- graph file I/O ---------------------------------------------------------


def write_graph(net: Network, fh: TextIO) -> None:
    fh.write(f"nodes {net.n}\n")
    for v, (x, y) in enumerate(net.coords):
        fh.write(f"node {v} {x!r} {y!r}\n")
    for u, v, a in net.edges():
        fh.write(f"edge {u} {v} {a.cost!r} {a.delay!r}\n")


def read_graph(fh: TextIO, require_connected: bool = True) -> Network:
    n: int | None = None
    coords: dict[int, tuple[float, float]] = {}
    edges: list[tuple[int, int, EdgeAttr]] = []
    pairs: set[tuple[int, int]] = set()

    def node_id(tok: str, lineno: int) -> int:
        try:
            v = int(tok)
        except ValueError:
            raise GraphFormatError(f"bad node id {tok!r}", lineno) from None
        if n is None or not 0 <= v < n:
            raise GraphFormatError(f"node id {v} out of range", lineno)
        return v

    for lineno, raw in enumerate(fh, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        try:
            if tok[0] == "nodes" and len(tok) == 2:
                if n is not None:
                    raise GraphFormatError("repeated header", lineno)
                n = int(tok[1])
                if n < 0:
                    raise GraphFormatError("negative node count", lineno)
            elif n is None:
                raise GraphFormatError("expected header 'nodes <n>'", lineno)
            elif tok[0] == "node" and len(tok) == 4:
                v = node_id(tok[1], lineno)
                if v in coords:
                    raise GraphFormatError(f"duplicate node {v}", lineno)
                coords[v] = (float(tok[2]), float(tok[3]))
            elif tok[0] == "edge" and len(tok) == 5:
                u, v = node_id(tok[1], lineno), node_id(tok[2], lineno)
                key = (min(u, v), max(u, v))
                if key in pairs:
                    raise GraphFormatError(f"duplicate edge {key}", lineno)
                if u == v:
                    raise GraphFormatError(f"self-loop on {u}", lineno)
                pairs.add(key)
                edges.append((u, v, EdgeAttr(float(tok[3]), float(tok[4]))))
            else:
                raise GraphFormatError(f"unrecognised line {line!r}", lineno)
        except GraphFormatError:
            raise
        except (ValueError, GraphError) as exc:
            raise GraphFormatError(str(exc), lineno) from None

    if n is None:
        raise GraphFormatError("missing header 'nodes <n>'")
    if len(coords) != n:
        missing = sorted(set(range(n)) - set(coords))
        raise GraphFormatError(f"missing node lines for {missing[:5]}")
    net = Network([coords[v] for v in range(n)], edges)
    if require_connected and not net.is_connected():
        raise GraphFormatError("graph is not connected")
    return net
