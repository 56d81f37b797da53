"""Weight-bucketed greedy matching with a trade-off parameter alpha.

Edges are grouped into nested levels E_i = {e : w(e) >= alpha**i}; one shared
rank draw orders all of them, a greedy maximal matching is built per level,
and the per-level matchings merge top level first, skipping anything adjacent
to an already-kept edge.  The result is a 1/(4*alpha)-approximation of the
maximum-weight matching, and because all levels share one identity-keyed
rank scope, coupled runs under edge deletion stay aligned level by level.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .graphs import Matching, WeightedGraph
from .greedy import EdgeOrder, select_greedy
from .tape import InvocationPath, RandomTape, ROOT

__all__ = ["WeightBuckets", "build_buckets", "weighted_matching", "merge_level_matchings"]


@dataclass(frozen=True)
class WeightBuckets:
    """Nested edge levels: levels[i] holds every edge of weight >= alpha**i."""

    alpha: float
    levels: tuple[frozenset[tuple[int, int]], ...]

    @property
    def top(self) -> int:
        return len(self.levels) - 1


def _scaled_weights(wgraph: WeightedGraph) -> dict[tuple[int, int], float]:
    # Weights below 1 are lifted by 1/min-weight; bucket structure and the
    # approximation ratio are scale-invariant.
    w_min = wgraph.min_weight()
    if w_min >= 1:
        return dict(wgraph.weights)
    return {e: w / w_min for e, w in wgraph.weights.items()}


def build_buckets(wgraph: WeightedGraph, alpha: float) -> WeightBuckets:
    """Group edges into levels by weight threshold alpha**i."""
    if not alpha > 1:
        raise ValueError(f"alpha must be > 1, got {alpha}")
    if not wgraph.weights:
        return WeightBuckets(alpha, (frozenset(),))
    weights = _scaled_weights(wgraph)
    w_max = max(weights.values())
    top = 0
    while alpha ** (top + 1) <= w_max:
        top += 1
    levels = []
    for i in range(top + 1):
        threshold = alpha**i
        levels.append(frozenset(e for e, w in weights.items() if w >= threshold))
    return WeightBuckets(alpha, tuple(levels))


def merge_level_matchings(level_matchings: list[list[tuple[int, int]]]) -> Matching:
    """Merge per-level matchings, top level first, skipping adjacent edges."""
    taken: set[int] = set()
    out = []
    for edges in reversed(level_matchings):
        for u, v in edges:
            if u in taken or v in taken:
                continue
            taken.add(u)
            taken.add(v)
            out.append((u, v))
    return Matching(frozenset(out))


def weighted_matching(
    wgraph: WeightedGraph,
    alpha: float,
    tape: RandomTape,
    scope: InvocationPath = ROOT,
    stats: Optional[dict] = None,
) -> Matching:
    """Bucketed greedy maximum-weight matching under shared edge ranks.

    ``stats``, when given, records the level count and total edge visits
    (visits stay within m * (levels + 1)).
    """
    buckets = build_buckets(wgraph, alpha)
    order = EdgeOrder.from_tape(tape, scope.child("order"))
    ranked_all = order.sort(wgraph.graph.edges)
    visits = 0
    level_matchings = []
    for level in buckets.levels:
        ranked = [e for e in ranked_all if e in level]
        visits += len(ranked)
        level_matchings.append(select_greedy(ranked))
    result = merge_level_matchings(level_matchings)
    if stats is not None:
        stats["levels"] = len(buckets.levels)
        stats["edge_visits"] = visits
        stats["level_sizes"] = [len(lv) for lv in buckets.levels]
    return result
