from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import strategies as st

from dclc.graph import EdgeAttr, MulticastRequest, Network
from dclc.topology import WaxmanConfig, generate


def make_net(n, edges, coords=None):
    """``edges`` as ``(u, v, cost, delay)`` tuples."""
    coords = coords or [(float(i), 0.0) for i in range(n)]
    return Network(coords, [(u, v, EdgeAttr(c, d)) for u, v, c, d in edges])


@pytest.fixture
def triangle():
    # s=0, a=1, d=2
    return make_net(3, [(0, 1, 1, 0.09), (1, 2, 1, 0.09), (0, 2, 10, 0.01)])


@pytest.fixture
def hub():
    # hub 0 reaches terminals 1..4 at cost 1; terminals pairwise at cost 3
    edges = [(0, t, 1, 0.001) for t in range(1, 5)]
    edges += [(a, b, 3, 0.001) for a, b in itertools.combinations(range(1, 5), 2)]
    return make_net(5, edges)


def small_waxman(seed: int, n: int, max_edges: int = 20) -> Network | None:
    """Dense enough Waxman draw for exhaustive search; None if over the edge budget."""
    net = generate(WaxmanConfig(n=n, alpha=0.6, beta=0.6, seed=seed))
    return net if net.num_edges <= max_edges else None


def random_request(net: Network, rng: np.random.Generator, m: int, bound: float) -> MulticastRequest:
    picks = rng.choice(net.n, size=m + 1, replace=False)
    return MulticastRequest(int(picks[0]), frozenset(int(x) for x in picks[1:]), bound)


@st.composite
def networks(draw, min_nodes=2, max_nodes=8, min_cost=0, extra_edges=8):
    """Connected networks: random spanning tree plus extra chords."""
    n = draw(st.integers(min_nodes, max_nodes))
    pairs = {}
    for v in range(1, n):
        u = draw(st.integers(0, v - 1))
        pairs[(u, v)] = None
    for _ in range(draw(st.integers(0, extra_edges))):
        u = draw(st.integers(0, n - 1))
        v = draw(st.integers(0, n - 1))
        if u != v:
            pairs.setdefault((min(u, v), max(u, v)), None)
    edges = [
        (u, v, draw(st.integers(min_cost, 5)), draw(st.floats(0.001, 0.03)))
        for u, v in sorted(pairs)
    ]
    return make_net(n, edges)


@st.composite
def instances(draw, min_nodes=2, max_nodes=8, min_cost=0):
    net = draw(networks(min_nodes=min_nodes, max_nodes=max_nodes, min_cost=min_cost))
    nodes = draw(st.permutations(range(net.n)))
    m = draw(st.integers(1, net.n - 1))
    bound = draw(st.sampled_from([0.005, 0.01, 0.02, 0.04, 0.08, 10.0]))
    return net, MulticastRequest(nodes[0], frozenset(nodes[1 : m + 1]), bound)


# -- acceptance summary ------------------------------------------------------

ACCEPTANCE: list[tuple[str, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
