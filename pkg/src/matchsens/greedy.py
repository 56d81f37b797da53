"""Randomized greedy maximal matching and its change-set diagnostic.

The greedy algorithm scans edges in increasing rank order and adds an edge
whenever neither endpoint is already covered.  Its output satisfies the fixed
point characterization: an edge is in the matching iff none of its
lower-ranked neighboring edges is.

``change_set`` computes, for a deletion target, the closure of edges whose
matching membership could be forced to change, evaluated entirely against the
matching on the *original* graph.  It is a superset of the edges that actually
differ between the coupled runs on the original and perturbed graphs, and its
expected size under random ranks is the quantity the sensitivity experiments
track.
"""

from __future__ import annotations

from collections import deque
from typing import Hashable, Iterable, Mapping, Optional, Sequence

import numpy as np

from .graphs import Graph, Matching, NotFoundError, canon
from .tape import InvocationPath, RandomTape

__all__ = ["EdgeOrder", "greedy_matching", "select_greedy", "change_set", "change_set_for_edge"]


class EdgeOrder:
    """A strict total order on unordered vertex pairs.

    Tape-backed orders cover every pair (ranks are computed on demand), so the
    order restricted to any subgraph is automatically the induced one.
    Explicit orders cover a fixed edge set and complain about anything else.
    Ranks are 64-bit; ties (negligible, but possible) break lexicographically
    on the pair itself.
    """

    __slots__ = ("_ranks", "_tape", "_scope")

    def __init__(
        self,
        ranks: Optional[dict[tuple[int, int], int]] = None,
        tape: Optional[RandomTape] = None,
        scope: Optional[InvocationPath] = None,
    ):
        self._ranks: dict[tuple[int, int], int] = dict(ranks) if ranks else {}
        self._tape = tape
        self._scope = scope

    @classmethod
    def from_tape(cls, tape: RandomTape, scope: InvocationPath) -> "EdgeOrder":
        return cls(tape=tape, scope=scope)

    @classmethod
    def from_ranks(cls, ranks: Mapping[tuple[int, int], int]) -> "EdgeOrder":
        return cls(ranks={canon(u, v): r for (u, v), r in ranks.items()})

    @classmethod
    def from_sequence(cls, edges: Sequence[tuple[int, int]]) -> "EdgeOrder":
        """Order in which earlier-listed edges have smaller rank."""
        return cls(ranks={canon(u, v): i for i, (u, v) in enumerate(edges)})

    def rank(self, pair: tuple[int, int]) -> int:
        e = canon(*pair)
        r = self._ranks.get(e)
        if r is None:
            if self._tape is None:
                raise NotFoundError(f"order does not cover edge {e}")
            r = self._tape.edge_rank_bits(e, self._scope)
            self._ranks[e] = r
        return r

    def key(self, pair: tuple[int, int]) -> tuple[int, tuple[int, int]]:
        e = canon(*pair)
        return (self.rank(e), e)

    def ensure_bulk(self, edges: Iterable[tuple[int, int]]) -> None:
        """Vectorized rank fill for tape-backed orders."""
        if self._tape is None:
            return
        missing = [e for e in edges if e not in self._ranks]
        if not missing:
            return
        us = np.fromiter((e[0] for e in missing), dtype=np.uint64, count=len(missing))
        vs = np.fromiter((e[1] for e in missing), dtype=np.uint64, count=len(missing))
        bits = self._tape.edge_rank_bits_bulk(us, vs, self._scope)
        self._ranks.update(zip(missing, bits.tolist()))

    def sort(self, edges: Iterable[tuple[int, int]]) -> list[tuple[int, int]]:
        es = [canon(u, v) for u, v in edges]
        self.ensure_bulk(es)
        return sorted(es, key=self.key)


def select_greedy(
    edges_in_rank_order: Iterable[tuple[Hashable, Hashable]],
) -> list[tuple[Hashable, Hashable]]:
    """Greedy matching scan over edges already sorted by rank."""
    taken: set = set()
    out = []
    for a, b in edges_in_rank_order:
        if a in taken or b in taken:
            continue
        taken.add(a)
        taken.add(b)
        out.append((a, b))
    return out


def greedy_matching(graph: Graph, order: EdgeOrder) -> Matching:
    """Maximal matching built by scanning edges in increasing rank.

    Raises a ValueError if the order does not cover every graph edge.
    """
    try:
        edges = order.sort(graph.edges)
    except NotFoundError as exc:
        raise ValueError(f"edge order does not cover the graph: {exc}") from None
    return Matching(frozenset(select_greedy(edges)))


def _adjacent_edges(graph: Graph, e: tuple[int, int]):
    for x in e:
        for y in graph.neighbors(x):
            f = canon(x, y)
            if f != e:
                yield f


def _influence_closure(
    graph: Graph,
    order: EdgeOrder,
    matched: frozenset[tuple[int, int]],
    seed_edge: Optional[tuple[int, int]],
) -> frozenset[tuple[int, int]]:
    """Fixed point of the change recursion, computed with a worklist.

    An edge joins the closure if it is matched and some lower-ranked closure
    edge touches it, or if it is unmatched and all of its lower-ranked matched
    neighbors are already in the closure.  Both conditions are evaluated
    against the matching on the original graph.
    """
    if seed_edge is None or seed_edge not in matched:
        return frozenset()
    out: set[tuple[int, int]] = set()
    queue: deque[tuple[int, int]] = deque([seed_edge])
    while queue:
        f = queue.popleft()
        if f in out:
            continue
        out.add(f)
        f_key = order.key(f)
        f_matched = f in matched
        for e in _adjacent_edges(graph, f):
            if e in out:
                continue
            if e in matched:
                if f_key < order.key(e):
                    queue.append(e)
            elif f_matched:
                e_key = order.key(e)
                if all(
                    g in out
                    for g in _adjacent_edges(graph, e)
                    if g in matched and order.key(g) < e_key
                ):
                    queue.append(e)
    return frozenset(out)


def change_set(
    graph: Graph,
    v: int,
    order: EdgeOrder,
    matching: Optional[Matching] = None,
) -> frozenset[tuple[int, int]]:
    """Edges whose membership may change when vertex ``v`` is deleted.

    Seeded at the matched edge covering ``v`` (empty when ``v`` is free): the
    coupled runs on the graph and the vertex-deleted graph can only disagree
    inside this set.
    """
    if not graph.has_vertex(v):
        raise NotFoundError(f"vertex {v} not in graph")
    if matching is None:
        matching = greedy_matching(graph, order)
    seed = next((e for e in matching.edges if v in e), None)
    return _influence_closure(graph, order, matching.edges, seed)


def change_set_for_edge(
    graph: Graph,
    e: tuple[int, int],
    order: EdgeOrder,
    matching: Optional[Matching] = None,
) -> frozenset[tuple[int, int]]:
    """Edge-deletion variant of :func:`change_set`, seeded at the deleted edge."""
    e = canon(*e)
    if e not in graph.edges:
        raise NotFoundError(f"edge {e} not in graph")
    if matching is None:
        matching = greedy_matching(graph, order)
    seed = e if e in matching.edges else None
    return _influence_closure(graph, order, matching.edges, seed)
