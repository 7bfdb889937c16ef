import math

import pytest
from hypothesis import given

from conftest import instances, make_net, networks
from dclc.graph import MulticastRequest, path_delay
from dclc.shortest_paths import (
    Metric,
    UnreachedError,
    dijkstra,
    extract_path,
    least_delay_tree,
    nearest_to_set,
    spt_routed_tree,
)
from dclc.topology import WaxmanConfig, generate


def bellman_ford(net, root, metric):
    dist = {v: math.inf for v in net.nodes()}
    dist[root] = 0.0
    for _ in range(net.n - 1):
        changed = False
        for u, v, a in net.edges():
            w = metric(a)
            if dist[u] + w < dist[v]:
                dist[v] = dist[u] + w
                changed = True
            if dist[v] + w < dist[u]:
                dist[u] = dist[v] + w
                changed = True
        if not changed:
            break
    return dist


def simple_paths(net, s, t):
    stack = [(s,)]
    while stack:
        p = stack.pop()
        if p[-1] == t:
            yield p
            continue
        for w in net.neighbors(p[-1]):
            if w not in p:
                stack.append(p + (w,))


def test_root_distance_zero():
    net = make_net(2, [(0, 1, 1, 0.1)])
    assert dijkstra(net, 0, Metric.DELAY).dist[0] == 0


def test_triangle_detour():
    net = make_net(3, [(0, 1, 1, 3.0), (0, 2, 1, 1.0), (2, 1, 1, 1.0)])
    spt = dijkstra(net, 0, Metric.DELAY)
    assert spt.dist[1] == 2.0
    assert spt.parent[1] == 2
    assert extract_path(spt, 1) == (0, 2, 1)


def test_tie_keeps_first_settled_father():
    # 0-1-3 and 0-2-3 both cost 2; node 1 settles first
    net = make_net(4, [(0, 1, 1, 0), (0, 2, 1, 0), (1, 3, 1, 0), (2, 3, 1, 0)])
    assert dijkstra(net, 0, Metric.COST).parent[3] == 1


def test_extract_path_basics():
    net = make_net(3, [(0, 1, 1, 0.1), (1, 2, 1, 0.1)])
    spt = dijkstra(net, 0, Metric.COST)
    assert extract_path(spt, 0) == (0,)
    assert extract_path(spt, 2) == (0, 1, 2)
    disconnected = make_net(3, [(0, 1, 1, 0.1)])
    with pytest.raises(UnreachedError):
        extract_path(dijkstra(disconnected, 0, Metric.COST), 2)


@pytest.mark.parametrize("seed", range(10))
@pytest.mark.parametrize("metric", list(Metric))
def test_matches_bellman_ford(seed, metric):
    net = generate(WaxmanConfig(n=30, seed=seed))
    assert dijkstra(net, seed % 30, metric).dist == bellman_ford(net, seed % 30, metric)


@given(networks(max_nodes=9))
def test_sptree_invariants(net):
    for metric in Metric:
        spt = dijkstra(net, 0, metric)
        assert spt.dist[0] == 0
        for v, p in spt.parent.items():
            assert spt.dist[v] == spt.dist[p] + metric(net.edge(p, v))
        for u, v, a in net.edges():
            assert spt.dist[v] <= spt.dist[u] + metric(a) + 1e-12
            assert spt.dist[u] <= spt.dist[v] + metric(a) + 1e-12


@given(networks(max_nodes=9))
def test_extracted_path_delay_equals_distance(net):
    spt = dijkstra(net, 0, Metric.DELAY)
    for v in net.nodes():
        assert path_delay(net, extract_path(spt, v)) == pytest.approx(spt.dist[v], abs=1e-9)


def test_equal_attributes_give_equal_distances():
    base = generate(WaxmanConfig(n=25, seed=4))
    same = make_net(base.n, [(u, v, a.cost, a.cost) for u, v, a in base.edges()], list(base.coords))
    assert dijkstra(same, 3, Metric.COST).dist == dijkstra(same, 3, Metric.DELAY).dist


def test_nearest_to_set():
    net = make_net(5, [(0, 1, 1, 0), (1, 2, 1, 0), (2, 3, 1, 0), (3, 4, 1, 0)])
    near = nearest_to_set(net, {0, 4})
    assert [near.dist[v] for v in range(5)] == [0, 1, 2, 1, 0]
    assert extract_path(near, 2)[0] == 0  # tie between 0 and 4 goes to the smaller id


def test_least_delay_feasibility_simple():
    net = make_net(3, [(0, 1, 1, 0.02), (1, 2, 1, 0.02)])
    _, ok = least_delay_tree(net, MulticastRequest(0, frozenset({1, 2}), math.inf))
    assert ok
    _, ok = least_delay_tree(net, MulticastRequest(0, frozenset({1}), 0.019))
    assert not ok


@given(instances(max_nodes=8))
def test_least_delay_feasibility_matches_enumeration(inst):
    net, req = inst
    _, ok = least_delay_tree(net, req)
    best = {d: min(path_delay(net, p) for p in simple_paths(net, req.source, d)) for d in req.destinations}
    assert ok == all(best[d] <= req.delay_bound for d in req.destinations)


def test_spt_routed_tree_serves_only_destinations():
    net = make_net(4, [(0, 1, 1, 0.01), (1, 2, 1, 0.01), (0, 3, 1, 0.01)])
    req = MulticastRequest(0, frozenset({2}), 1.0)
    tree = spt_routed_tree(net, least_delay_tree(net, req)[0], req.destinations)
    assert dict(tree.parent) == {1: 0, 2: 1}
