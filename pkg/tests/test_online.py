import json

import pytest

from matchsens.graphs import Graph, gnp, is_maximal, path
from matchsens.greedy import EdgeOrder, greedy_matching
from matchsens.online import ReplacementTrace, VertexArrivalStream, simulate
from matchsens.sensitivity import GreedyRunner, _GREEDY_SCOPE
from matchsens.tape import RandomTape


def test_isolated_vertices_cause_no_replacements():
    g = Graph(5, [])
    trace = simulate(VertexArrivalStream.by_id(g), GreedyRunner(), RandomTape(1))
    assert trace.total == 0
    assert trace.sizes == (0,) * 5


def test_two_vertex_stream():
    g = path(2)
    trace = simulate(VertexArrivalStream.by_id(g), GreedyRunner(), RandomTape(1))
    assert trace.replacements == (0, 1)
    assert trace.total == 1
    assert trace.sizes == (0, 1)


def test_order_must_be_permutation():
    with pytest.raises(ValueError):
        VertexArrivalStream(path(3), (0, 1))
    with pytest.raises(ValueError):
        VertexArrivalStream(path(3), (0, 1, 1))


def test_prefix_graphs_grow_and_keep_identity():
    g = gnp(12, 0.3, 3)
    stream = VertexArrivalStream.shuffled(g, 7)
    prev = set()
    for i in range(1, g.n + 1):
        pg = stream.prefix(i)
        assert pg.n == g.n
        assert prev <= pg.edges <= g.edges
        arrived = set(stream.order[:i])
        assert pg.edges == {e for e in g.edges if e[0] in arrived and e[1] in arrived}
        prev = pg.edges


def test_simulation_is_deterministic():
    g = gnp(20, 0.2, 5)
    stream = VertexArrivalStream.shuffled(g, 2)
    t1 = simulate(stream, GreedyRunner(), RandomTape(9))
    t2 = simulate(stream, GreedyRunner(), RandomTape(9))
    assert t1 == t2


def test_recomputation_matches_prefix_greedy_and_is_maximal():
    g = gnp(15, 0.3, 6)
    stream = VertexArrivalStream.shuffled(g, 3)
    tape = RandomTape(4)
    matchings = []
    simulate(stream, GreedyRunner(), tape, matchings_out=matchings)
    order = EdgeOrder.from_tape(tape, _GREEDY_SCOPE)
    for i, m in enumerate(matchings, start=1):
        pg = stream.prefix(i)
        assert m == greedy_matching(pg, order)
        assert is_maximal(pg, m)


def test_trace_totals_and_json():
    g = gnp(10, 0.4, 1)
    trace = simulate(VertexArrivalStream.by_id(g), GreedyRunner(), RandomTape(0))
    assert trace.total == sum(trace.replacements)
    doc = json.loads(trace.to_json_bytes())
    assert doc["total"] == trace.total
    assert doc["schema"] == "replacement-trace/1"
    assert len(doc["sizes"]) == g.n
