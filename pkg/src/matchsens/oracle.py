"""Exact maximum matchings for small graphs by memoized branching.

Ground truth for every approximation claim at desk scale.  Branches on the
lowest-indexed vertex that still has an available neighbor (match it or skip
it), memoized on the bitmask of available vertices.  A size guard refuses
instances whose non-isolated vertex count makes the mask space unreasonable.
"""

from __future__ import annotations

from typing import Optional

from .graphs import Graph, Matching, WeightedGraph, canon

__all__ = ["OracleGuardError", "max_matching", "max_weight_matching"]

DEFAULT_MAX_N = 24


class OracleGuardError(RuntimeError):
    """Instance exceeds the configured exact-solver size guard."""


def _active_vertices(graph: Graph, max_n: int) -> list[int]:
    active = [v for v in range(graph.n) if graph.degree(v) > 0]
    if len(active) > max_n:
        raise OracleGuardError(
            f"{len(active)} non-isolated vertices exceed the guard of {max_n}"
        )
    return active


def _solve(
    nbr_mask: list[int],
    weight: Optional[list[dict[int, float]]],
) -> tuple[float, list[tuple[int, int]]]:
    k = len(nbr_mask)
    memo: dict[int, tuple[float, Optional[tuple[int, int]]]] = {}

    def best(mask: int) -> float:
        # Drop leading vertices with no available partner; canonicalizes the key.
        while mask:
            v = (mask & -mask).bit_length() - 1
            if nbr_mask[v] & mask:
                break
            mask &= mask - 1
        else:
            return 0.0
        hit = memo.get(mask)
        if hit is not None:
            return hit[0]
        v = (mask & -mask).bit_length() - 1
        value = best(mask & ~(1 << v))
        choice: Optional[tuple[int, int]] = None
        avail = nbr_mask[v] & mask
        while avail:
            u = (avail & -avail).bit_length() - 1
            avail &= avail - 1
            gain = 1.0 if weight is None else weight[v][u]
            cand = gain + best(mask & ~(1 << v) & ~(1 << u))
            if cand > value:
                value = cand
                choice = (v, u)
        memo[mask] = (value, choice)
        return value

    full = (1 << k) - 1
    total = best(full)

    witness = []
    mask = full
    while mask:
        v = (mask & -mask).bit_length() - 1
        if not (nbr_mask[v] & mask):
            mask &= mask - 1
            continue
        entry = memo.get(mask)
        choice = entry[1] if entry is not None else None
        if choice is None:
            mask &= mask - 1
        else:
            witness.append(choice)
            mask &= ~(1 << choice[0]) & ~(1 << choice[1])
    return total, witness


def max_matching(graph: Graph, max_n: int = DEFAULT_MAX_N) -> tuple[int, Matching]:
    """Exact maximum-cardinality matching: (size, one witness)."""
    active = _active_vertices(graph, max_n)
    index = {v: i for i, v in enumerate(active)}
    nbr_mask = [0] * len(active)
    for u, v in graph.edges:
        nbr_mask[index[u]] |= 1 << index[v]
        nbr_mask[index[v]] |= 1 << index[u]
    total, witness = _solve(nbr_mask, None)
    pairs = [canon(active[a], active[b]) for a, b in witness]
    return int(total), Matching(frozenset(pairs))


def max_weight_matching(
    wgraph: WeightedGraph, max_n: int = DEFAULT_MAX_N
) -> tuple[float, Matching]:
    """Exact maximum-weight matching: (weight, one witness)."""
    graph = wgraph.graph
    active = _active_vertices(graph, max_n)
    index = {v: i for i, v in enumerate(active)}
    nbr_mask = [0] * len(active)
    weight: list[dict[int, float]] = [{} for _ in active]
    for (u, v), w in wgraph.weights.items():
        a, b = index[u], index[v]
        nbr_mask[a] |= 1 << b
        nbr_mask[b] |= 1 << a
        weight[a][b] = w
        weight[b][a] = w
    total, witness = _solve(nbr_mask, weight)
    pairs = [canon(active[a], active[b]) for a, b in witness]
    return total, Matching(frozenset(pairs))
