"""Shared test helpers, including independent brute-force oracles."""

from itertools import combinations

from matchsens.graphs import Graph, WeightedGraph, canon


def enumerate_max_matching(graph: Graph) -> int:
    """Exhaustive maximum matching size over all edge subsets (m <= ~12)."""
    edges = sorted(graph.edges)
    best = 0
    for k in range(len(edges), 0, -1):
        if k <= best:
            break
        for combo in combinations(edges, k):
            used = set()
            ok = True
            for u, v in combo:
                if u in used or v in used:
                    ok = False
                    break
                used.add(u)
                used.add(v)
            if ok:
                best = max(best, k)
                break
    return best


def enumerate_max_weight_matching(wgraph: WeightedGraph) -> float:
    """Exhaustive maximum-weight matching over all edge subsets."""
    edges = sorted(wgraph.graph.edges)
    best = 0.0
    for k in range(1, len(edges) + 1):
        for combo in combinations(edges, k):
            used = set()
            ok = True
            for u, v in combo:
                if u in used or v in used:
                    ok = False
                    break
                used.add(u)
                used.add(v)
            if ok:
                best = max(best, sum(wgraph.weights[canon(u, v)] for u, v in combo))
    return best


def all_matchings(graph: Graph):
    """Every matching (as a frozenset of edges) of a tiny graph."""
    edges = sorted(graph.edges)
    out = [frozenset()]
    for k in range(1, len(edges) + 1):
        for combo in combinations(edges, k):
            used = set()
            ok = True
            for u, v in combo:
                if u in used or v in used:
                    ok = False
                    break
                used.add(u)
                used.add(v)
            if ok:
                out.append(frozenset(combo))
    return out


SIX_CHAIN_TEXT = "6 5\n0 1\n2 3\n0 5\n1 2\n3 4\n"
