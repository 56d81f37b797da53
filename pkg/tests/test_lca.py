import pytest

from matchsens.graphs import (
    DeleteEdge,
    Graph,
    apply_perturbation,
    bounded_degree,
    cycle,
    gnp,
    is_maximal,
    path,
)
from matchsens.lca import (
    Coloring,
    ProbeOracle,
    color_forests,
    coloring_to_mm,
    deterministic_mm,
    form_forests,
    mm_query,
    probe_bound,
    reduction_rounds,
)
from matchsens.lca import _QueryContext
from matchsens.graphs import NotFoundError
from matchsens.tape import fold


def test_form_forests_p4():
    f = form_forests(path(4), 2)
    assert f.edge_sets() == [{(0, 1)}, {(1, 2), (2, 3)}]


def test_form_forests_single_edge_and_empty():
    assert form_forests(Graph(2, [(0, 1)]), 1).edge_sets() == [{(0, 1)}]
    assert form_forests(Graph(3, []), 2).edge_sets() == [set(), set()]


def test_form_forests_degree_violation_names_vertex():
    with pytest.raises(ValueError, match="vertex 1"):
        form_forests(path(4), 1)


def test_forests_partition_and_are_forests():
    for seed in range(20):
        g = bounded_degree(40, 3, seed)
        f = form_forests(g, 3)
        seen = set()
        for i, es in enumerate(f.edge_sets()):
            for u, p in es:
                assert p > u  # oriented low -> high: acyclic
                e = (u, p)
                assert e not in seen
                seen.add(e)
        assert seen == g.edges
        for forest in f.parents:
            assert all(p is None or p > u for u, p in enumerate(forest))


def test_single_vertex_forest_gets_color_zero():
    c = color_forests(form_forests(Graph(1, []), 1))
    assert c.of(0) == (0,)
    # also for a larger id living alone in its forest
    g = Graph(5, [(0, 1)])
    col = color_forests(form_forests(g, 1))
    for v in (2, 3, 4):
        assert col.of(v) == (0,)


def test_single_edge_two_distinct_small_colors():
    col = color_forests(form_forests(Graph(2, [(0, 1)]), 1))
    a, b = col.of(0)[0], col.of(1)[0]
    assert a != b and 0 <= a <= 5 and 0 <= b <= 5


def test_long_path_proper_with_six_colors():
    # tree with max degree 2 and scrambled ids
    n = 10_000
    perm = sorted(range(n), key=lambda v: (fold(123, v), v))
    edges = [(perm[i], perm[i + 1]) for i in range(n - 1)]
    g = Graph(n, edges)
    f = form_forests(g, 2)
    col = color_forests(f)
    assert reduction_rounds(n) <= 5
    for i, es in enumerate(f.edge_sets()):
        for u, p in es:
            assert col.of(u)[i] != col.of(p)[i]
        assert {t[i] for t in col.colors} <= set(range(6))


def test_coloring_to_mm_color_order():
    g = path(4)
    col = Coloring(((0, 0), (1, 0), (2, 0), (3, 0)))
    m = coloring_to_mm(g, col)
    assert m.edges == {(0, 1), (2, 3)}


def test_coloring_to_mm_trivial_cases():
    assert coloring_to_mm(Graph(2, [(0, 1)]), Coloring(((0,), (1,)))).edges == {(0, 1)}
    assert coloring_to_mm(Graph(2, []), Coloring(((0,), (0,)))).size == 0


def test_coloring_to_mm_rejects_improper():
    with pytest.raises(ValueError, match="proper"):
        coloring_to_mm(Graph(2, [(0, 1)]), Coloring(((0,), (0,))))


def test_deterministic_mm_examples():
    assert deterministic_mm(path(4)).size >= 1
    assert deterministic_mm(cycle(6)).size >= 2
    g = bounded_degree(60, 3, 5)
    assert deterministic_mm(g) == deterministic_mm(g)
    assert is_maximal(g, deterministic_mm(g))


def test_mm_query_equivalence_on_sparse_graph():
    g = bounded_degree(500, 3, 42)
    m = deterministic_mm(g)
    oracle = ProbeOracle(g)
    for e in g.sorted_edges():
        ans, probes = mm_query(oracle, e)
        assert ans == (e in m.edges)
        assert probes > 0


def test_mm_query_isolated_edge():
    g = Graph(4, [(0, 1)])
    oracle = ProbeOracle(g, max_deg=1)
    ans, probes = mm_query(oracle, (0, 1))
    assert ans is True
    assert probes <= 2 * (1 + 1)


def test_mm_query_missing_edge():
    with pytest.raises(NotFoundError):
        mm_query(ProbeOracle(path(3)), (0, 2))


def test_mm_query_purity_of_probe_counts():
    g = bounded_degree(100, 3, 7)
    e = g.sorted_edges()[0]
    o1 = ProbeOracle(g)
    a1, p1 = mm_query(o1, e)
    a2, p2 = mm_query(o1, e)  # fresh memo per query, same count
    assert (a1, p1) == (a2, p2)
    assert o1.probes == p1 + p2


def test_probe_oracle_counts_every_probe():
    g = path(3)
    o = ProbeOracle(g)
    assert o.probe(0, 1) == 1
    assert o.probe(0, 2) is None
    assert o.probes == 2
    with pytest.raises(ValueError):
        o.probe(0, 0)


def test_color_query_probe_budget():
    for seed in range(6):
        for n, dmax in ((60, 2), (300, 3), (900, 3)):
            g = bounded_degree(n, dmax, seed)
            if g.max_degree() == 0:
                continue
            oracle = ProbeOracle(g)
            bound = probe_bound(n, oracle.max_deg)
            for v in range(0, n, max(1, n // 23)):
                before = oracle.probes
                ctx = _QueryContext(oracle)
                color = ctx.color(v)
                assert all(0 <= c <= 5 for c in color)
                assert oracle.probes - before <= bound


def test_query_colors_match_global():
    for seed in range(8):
        g = bounded_degree(150, 3, seed + 50)
        if g.max_degree() == 0:
            continue
        col = color_forests(form_forests(g, g.max_degree()))
        oracle = ProbeOracle(g)
        ctx = _QueryContext(oracle)
        for v in range(g.n):
            assert ctx.color(v) == col.of(v)


def test_locality_under_edge_deletion():
    g = bounded_degree(300, 3, 9)
    e = g.sorted_edges()[len(g.edges) // 2]
    m1 = deterministic_mm(g)
    g2 = apply_perturbation(g, DeleteEdge(e))
    m2 = deterministic_mm(g2)
    radius, dist = _measure_radius_and_distances(g, g2, e)
    for f in g2.sorted_edges():
        if dist[f] > radius:
            assert (f in m1.edges) == (f in m2.edges)
    changed = m1.edges ^ m2.edges
    ball = {f for f in g.edges if dist.get(f, 0) <= radius}
    assert changed <= ball
    assert len(changed) <= len(ball)


def _measure_radius_and_distances(g, g2, deleted):
    from collections import deque

    # max probe distance over all queries on both graphs
    radius = 0
    for graph in (g, g2):
        oracle = ProbeOracle(graph, max_deg=3)
        for f in graph.sorted_edges():
            probed = set()
            mm_query(oracle, f, probed=probed)
            d = _bfs_excentricity(graph, set(f), probed)
            radius = max(radius, d)
    # distance of every edge from the deleted edge, in the original graph
    dist_v = {deleted[0]: 0, deleted[1]: 0}
    q = deque([deleted[0], deleted[1]])
    while q:
        x = q.popleft()
        for y in g.neighbors(x):
            if y not in dist_v:
                dist_v[y] = dist_v[x] + 1
                q.append(y)
    dist = {
        f: min(dist_v.get(f[0], 10**9), dist_v.get(f[1], 10**9)) for f in g.edges
    }
    return radius, dist


def _bfs_excentricity(graph, sources, targets):
    from collections import deque

    dist = {s: 0 for s in sources}
    q = deque(sources)
    worst = 0
    remaining = set(targets) - sources
    while q and remaining:
        x = q.popleft()
        for y in graph.neighbors(x):
            if y not in dist:
                dist[y] = dist[x] + 1
                if y in remaining:
                    remaining.discard(y)
                    worst = max(worst, dist[y])
                q.append(y)
    return worst
