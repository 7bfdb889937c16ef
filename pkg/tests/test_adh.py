import itertools
import math

import pytest
from hypothesis import given, settings

from conftest import make_net, networks, small_waxman
from dclc.adh import Forest, adh_tree, merge_score, root_tree
from dclc.graph import tree_cost


def floyd_warshall(net):
    d = [[math.inf] * net.n for _ in range(net.n)]
    for v in net.nodes():
        d[v][v] = 0.0
    for u, v, a in net.edges():
        d[u][v] = d[v][u] = min(d[u][v], a.cost)
    for k in net.nodes():
        for i in net.nodes():
            for j in net.nodes():
                if d[i][k] + d[k][j] < d[i][j]:
                    d[i][j] = d[i][k] + d[k][j]
    return d


def brute_steiner(net, terminals):
    """Cheapest edge subset that forms a tree containing every terminal."""
    edges = list(net.edges())
    terminals = set(terminals)
    if len(terminals) == 1:
        return 0.0
    best = math.inf
    for r in range(1, net.n):
        for subset in itertools.combinations(edges, r):
            nodes = {x for u, v, _ in subset for x in (u, v)}
            if not terminals <= nodes or len(nodes) != r + 1:
                continue
            # r edges on r+1 nodes is a tree iff connected
            seen, stack = set(), [next(iter(nodes))]
            adj = {x: [] for x in nodes}
            for u, v, _ in subset:
                adj[u].append(v)
                adj[v].append(u)
            while stack:
                x = stack.pop()
                if x not in seen:
                    seen.add(x)
                    stack.extend(adj[x])
            if seen == nodes:
                best = min(best, sum(a.cost for *_, a in subset))
    return best


def tree_is_acyclic_and_spanning(nodes, edges, terminals):
    if not terminals <= nodes or len(edges) != len(nodes) - 1:
        return False
    adj = {x: set() for x in nodes}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    seen, stack = set(), [next(iter(nodes))]
    while stack:
        x = stack.pop()
        if x not in seen:
            seen.add(x)
            stack.extend(adj[x])
    return seen == nodes


def test_merge_score_zero_for_member():
    net = make_net(3, [(0, 1, 1, 0), (1, 2, 4, 0)])
    forest = Forest(net, {0, 1})
    assert merge_score(net, 0, forest) == (1.0, 0, 1)


def test_merge_score_equidistant():
    net = make_net(3, [(0, 1, 2, 0), (1, 2, 2, 0)])
    forest = Forest(net, {0, 2})
    assert merge_score(net, 1, forest) == (4.0, 0, 1)


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_merge_score_matches_floyd_warshall(seed):
    net = None
    while net is None:
        net = small_waxman(seed, 12, max_edges=10**6)
        seed += 100
    terms = [0, 4, 7, 11]
    forest = Forest(net, terms)
    d = floyd_warshall(net)
    for v in net.nodes():
        score, i, j = merge_score(net, v, forest)
        dists = sorted(d[v][t] for t in terms)
        assert score == pytest.approx(dists[0] + dists[1], abs=1e-9)
    # after one merge the distance to the merged component is a min over its nodes
    _, v, i, j = min((merge_score(net, v, forest)[0], v, *merge_score(net, v, forest)[1:]) for v in net.nodes())
    forest.merge(v, i, j)
    comp = forest.components[min(i, j)]
    for x in net.nodes():
        assert forest.distance(x, min(i, j)) == pytest.approx(min(d[x][u] for u in comp.nodes), abs=1e-9)


def test_single_terminal():
    net = make_net(2, [(0, 1, 1, 0)])
    t = adh_tree(net, {1})
    assert t.nodes == {1} and not t.edges and t.cost(net) == 0 and t.iterations == 0


def test_two_terminals_is_shortest_path():
    net = make_net(4, [(0, 1, 1, 0), (1, 3, 1, 0), (0, 2, 1, 0), (2, 3, 5, 0), (0, 3, 4, 0)])
    t = adh_tree(net, {0, 3})
    assert t.cost(net) == 2 == floyd_warshall(net)[0][3]
    assert t.edges == {(0, 1), (1, 3)}


def test_hub_fixture(hub):
    assert brute_steiner(hub, {1, 2, 3, 4}) == 4
    t = adh_tree(hub, {1, 2, 3, 4})
    assert t.cost(hub) == 4
    assert 0 in t.nodes
    spokes_removed = make_net(5, [(u, v, a.cost, a.delay) for u, v, a in hub.edges() if u != 0])
    assert brute_steiner(spokes_removed, {1, 2, 3, 4}) == 9


@settings(max_examples=60, deadline=None)
@given(networks(max_nodes=7, extra_edges=5))
def test_adh_bounded_by_exact_steiner(net):
    terms = set(range(0, net.n, 2))
    t = adh_tree(net, terms)
    assert tree_is_acyclic_and_spanning(set(t.nodes), set(t.edges), terms)
    assert t.cost(net) >= brute_steiner(net, terms) - 1e-9


@settings(max_examples=60, deadline=None)
@given(networks(max_nodes=8, min_cost=1))
def test_forest_shrinks_by_one(net):
    terms = sorted(set(range(0, net.n, 2)) | {net.n - 1})
    forest = Forest(net, terms)
    k0 = forest.k
    while forest.k > 1:
        best = min((merge_score(net, v, forest), v) for v in net.nodes())
        (_, i, j), v = best
        before = forest.k
        forest.merge(v, i, j)
        assert forest.k == before - 1
        for comp in forest.components.values():
            assert tree_is_acyclic_and_spanning(set(comp.nodes), set(comp.edges), set())
    assert adh_tree(net, terms).iterations == k0 - 1


def test_splice_through_third_component_absorbs_it():
    net = make_net(5, [(0, 1, 1, 0), (1, 2, 1, 0), (2, 3, 1, 0), (3, 4, 1, 0)])
    forest = Forest(net, {0, 2, 4})
    # joining {0} and {4} through node 1 walks across {2}
    absorbed = forest.merge(1, 0, 2)
    assert absorbed == [1, 2]
    assert forest.k == 1
    (comp,) = forest.components.values()
    assert tree_is_acyclic_and_spanning(set(comp.nodes), set(comp.edges), {0, 2, 4})


def test_zero_cost_links():
    net = make_net(4, [(0, 1, 1, 0), (1, 2, 0, 0), (2, 3, 1, 0)])
    t = adh_tree(net, {0, 2, 3})
    assert t.cost(net) == 2
    assert tree_is_acyclic_and_spanning(set(t.nodes), set(t.edges), {0, 2, 3})


def test_overlapping_splice_paths_stay_acyclic():
    forest_net = make_net(
        6, [(0, 1, 1, 0), (1, 2, 1, 0), (1, 3, 1, 0), (3, 4, 1, 0), (2, 5, 1, 0), (4, 5, 9, 0)]
    )
    t = adh_tree(forest_net, {0, 4, 5})
    assert tree_is_acyclic_and_spanning(set(t.nodes), set(t.edges), {0, 4, 5})


def test_deterministic():
    net = small_waxman(5, 9, max_edges=10**6)
    assert adh_tree(net, {0, 3, 6, 8}) == adh_tree(net, {8, 6, 3, 0})


def test_root_tree_prunes_and_orients(hub):
    t = adh_tree(hub, {1, 2, 3, 4})
    rooted = root_tree(hub, t, 1)
    assert rooted.root == 1
    assert dict(rooted.parent) == {0: 1, 2: 0, 3: 0, 4: 0}
    assert tree_cost(rooted, hub) == t.cost(hub)
