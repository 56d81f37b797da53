import pytest
from hypothesis import given, settings, strategies as st

from matchsens.graphs import Graph, WeightedGraph, gnp, is_matching
from matchsens.oracle import max_weight_matching
from matchsens.tape import RandomTape, fold
from matchsens.weighted import build_buckets, weighted_matching

from util import enumerate_max_weight_matching


def wgraph_from_seed(n, p, seed, w_lo=1, w_hi=100):
    g = gnp(n, p, seed)
    weights = {
        e: w_lo + fold(seed ^ 0x5EED, i) % (w_hi - w_lo + 1)
        for i, e in enumerate(sorted(g.edges))
    }
    return WeightedGraph(g, weights) if g.m else None


def test_buckets_single_edge():
    wg = WeightedGraph(Graph(2, [(0, 1)]), {(0, 1): 5})
    b = build_buckets(wg, 2.0)
    assert len(b.levels) == 3  # thresholds 1, 2, 4
    assert all(lv == {(0, 1)} for lv in b.levels)
    m = weighted_matching(wg, 2.0, RandomTape(0))
    assert m.edges == {(0, 1)}


def test_buckets_nested():
    wg = wgraph_from_seed(12, 0.4, 3)
    b = build_buckets(wg, 2.0)
    for hi, lo in zip(b.levels[1:], b.levels[:-1]):
        assert hi <= lo
    assert b.levels[0] == wg.graph.edges


def test_bucket_alpha_validation():
    wg = WeightedGraph(Graph(2, [(0, 1)]), {(0, 1): 5})
    with pytest.raises(ValueError):
        build_buckets(wg, 1.0)


def test_heavy_edge_beats_adjacent_light():
    wg = WeightedGraph(
        Graph(3, [(0, 1), (1, 2)]), {(0, 1): 1, (1, 2): 100}
    )
    for seed in range(30):
        m = weighted_matching(wg, 2.0, RandomTape(seed))
        assert m.edges == {(1, 2)}


def test_sub_unit_weights_are_lifted():
    wg = WeightedGraph(
        Graph(3, [(0, 1), (1, 2)]), {(0, 1): 0.001, (1, 2): 0.1}
    )
    for seed in range(20):
        m = weighted_matching(wg, 2.0, RandomTape(seed))
        assert m.edges == {(1, 2)}


@settings(max_examples=50)
@given(st.integers(0, 5_000), st.sampled_from([2.0, 3.0]))
def test_quarter_alpha_approximation(seed, alpha):
    wg = wgraph_from_seed(10, 0.35, seed)
    if wg is None:
        return
    opt, _ = max_weight_matching(wg)
    m = weighted_matching(wg, alpha, RandomTape(seed))
    assert is_matching(wg.graph, m)
    got = sum(wg.weights[e] for e in m.edges)
    assert got >= opt / (4 * alpha)


def test_small_instances_against_enumeration():
    for seed in range(12):
        wg = wgraph_from_seed(7, 0.35, seed)
        if wg is None or wg.graph.m > 8:
            continue
        opt = enumerate_max_weight_matching(wg)
        got = sum(
            wg.weights[e]
            for e in weighted_matching(wg, 3.0, RandomTape(seed)).edges
        )
        assert got >= opt / 12


def test_top_level_kept_exactly_and_level_consistency():
    from matchsens.greedy import EdgeOrder, greedy_matching, select_greedy
    from matchsens.tape import ROOT

    wg = wgraph_from_seed(14, 0.35, 8)
    stats = {}
    m = weighted_matching(wg, 2.0, RandomTape(5), stats=stats)
    buckets = build_buckets(wg, 2.0)
    order = EdgeOrder.from_tape(RandomTape(5), ROOT.child("order"))
    ranked_all = order.sort(wg.graph.edges)
    top_greedy = frozenset(
        select_greedy([e for e in ranked_all if e in buckets.levels[-1]])
    )
    assert top_greedy <= m.edges  # top level merges unobstructed
    for level in buckets.levels:
        inter = m.edges & level
        assert is_matching(wg.graph, inter)
    assert stats["edge_visits"] <= wg.graph.m * (stats["levels"] + 1)
