"""Layered auxiliary graph and batch discovery of disjoint augmenting paths.

For a matching M in G and a length parameter ell, the layered graph H has
ell+2 layers.  The boundary layers 0 and ell+1 are copies of the vertex set;
each free vertex is active on exactly one boundary side (a tape draw).  Each
matched edge gets exactly one active oriented copy (u, v) in one internal
layer (another tape draw).  Inactive copies are isolated.

Edges of H connect active copies that could be consecutive on an augmenting
path.  With s a top-boundary copy, t a bottom-boundary copy, and (u, v)
oriented internal copies:

    s in layer ell+1  ~  (u, v) in layer ell      iff  s  adj u in G
    (u, v) in layer i+1  ~  (u', v') in layer i   iff  v  adj u' in G
    (u, v) in layer 1  ~  t in layer 0            iff  v  adj t in G

A top-to-bottom path s, (u_l, v_l), ..., (u_1, v_1), t in H decodes to the
G-path s, u_l, v_l, ..., u_1, v_1, t: an alternating augmenting path of
length 2*ell + 1 between two free vertices.

``find_paths`` grows vertex-disjoint partial paths level by level, recording
progress in a tag map: an active copy is untagged (absent), points to its
successor one layer down, is a dead end, or (bottom layer only) is stamped as
the consumed endpoint of a discovered path.  The loop structure depends only
on (ell, delta), never on graph content, so coupled runs on a graph and a
perturbed copy execute the same call sequence with the same tape scopes.
"""

from __future__ import annotations

import math
from typing import Iterable, Optional

from .graphs import Graph, Matching, canon, is_matching
from .greedy import select_greedy
from .tape import InvocationPath, RandomTape

__all__ = [
    "DEAD_END",
    "PATH_END",
    "Budget",
    "BudgetExceededError",
    "LayeredGraph",
    "build_layered",
    "find_paths",
    "augmenting_paths",
    "apply_augmentations",
    "validate_augmenting_paths",
]

HVertex = tuple[int, int, int]  # (layer, coord0, coord1); coord1 = -1 on boundaries


class _Sentinel:
    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name

    def __repr__(self) -> str:
        return self.name


DEAD_END = _Sentinel("dead_end")
PATH_END = _Sentinel("path_end")


class BudgetExceededError(RuntimeError):
    """The configured limit on greedy subcalls was hit; raise the budget."""


class Budget:
    """Counter of greedy subcalls with a hard cap."""

    __slots__ = ("limit", "count")

    def __init__(self, limit: int = 10**6):
        self.limit = limit
        self.count = 0

    def spend(self) -> None:
        self.count += 1
        if self.count > self.limit:
            raise BudgetExceededError(
                f"exceeded {self.limit} greedy subcalls; rerun with a larger "
                f"budget or smaller parameters"
            )


class LayeredGraph:
    """Active copies and adjacency rules of the layered graph."""

    __slots__ = ("graph", "matching", "ell", "top", "bottom", "mid")

    def __init__(
        self,
        graph: Graph,
        matching: Matching,
        ell: int,
        top: frozenset[int],
        bottom: frozenset[int],
        mid: tuple[dict[int, HVertex], ...],
    ):
        self.graph = graph
        self.matching = matching
        self.ell = ell
        self.top = top          # vertices active in layer ell+1
        self.bottom = bottom    # vertices active in layer 0
        self.mid = mid          # mid[i] maps first coordinate -> copy, i in [1, ell]

    def top_copies(self) -> list[HVertex]:
        return [(self.ell + 1, v, -1) for v in sorted(self.top)]

    def active_copies(self) -> frozenset[HVertex]:
        out = {(0, v, -1) for v in self.bottom}
        out.update((self.ell + 1, v, -1) for v in self.top)
        for i in range(1, self.ell + 1):
            out.update(self.mid[i].values())
        return frozenset(out)

    def down_neighbors(self, hv: HVertex) -> list[HVertex]:
        """Active copies one layer below hv, per the connection rules."""
        layer, a, b = hv
        g = self.graph
        if layer == self.ell + 1:
            lower = self.mid[self.ell]
            return [lower[w] for w in g.neighbors(a) if w in lower]
        if layer >= 2:
            lower = self.mid[layer - 1]
            return [lower[w] for w in g.neighbors(b) if w in lower]
        if layer == 1:
            return [(0, w, -1) for w in g.neighbors(b) if w in self.bottom]
        raise ValueError(f"no layer below {hv}")

    def describe(self) -> str:
        """Debug dump: one line per active copy, then one per h-edge."""
        lines = []
        for hv in sorted(self.active_copies(), reverse=True):
            layer, a, b = hv
            name = f"({a},{b})" if b >= 0 else str(a)
            lines.append(f"layer {layer}: {name}")
        for hv in sorted(self.active_copies(), reverse=True):
            if hv[0] >= 1:
                for lo in sorted(self.down_neighbors(hv)):
                    lines.append(f"edge {hv} -- {lo}")
        return "\n".join(lines) + "\n"


def build_layered(
    graph: Graph,
    matching: Matching,
    ell: int,
    tape: RandomTape,
    scope: InvocationPath,
) -> LayeredGraph:
    """Construct the layered graph with tape-driven activation."""
    if ell < 1:
        raise ValueError(f"ell must be >= 1, got {ell}")
    if not is_matching(graph, matching):
        raise ValueError("matching is not a valid matching of the graph")
    top: set[int] = set()
    bottom: set[int] = set()
    covered = matching.covered()
    for v in range(graph.n):
        if v in covered:
            continue
        if tape.free_vertex_side(v, ell, scope) == 0:
            bottom.add(v)
        else:
            top.add(v)
    mid: tuple[dict[int, HVertex], ...] = tuple({} for _ in range(ell + 1))
    for e in matching.edges:
        (a, b), layer = tape.matched_edge_slot(e, ell, scope)
        mid[layer][a] = (layer, a, b)
    return LayeredGraph(graph, matching, ell, frozenset(top), frozenset(bottom), mid)


def _bipartite_greedy(
    H: LayeredGraph,
    upper: list[HVertex],
    tags: dict,
    tape: RandomTape,
    scope: InvocationPath,
    budget: Optional[Budget],
    recorder: Optional[list],
) -> dict[HVertex, HVertex]:
    """Greedy matching between ``upper`` and the untagged copies one layer down.

    Returns the partner map in both directions.  Edge ranks are tape draws
    keyed by (scope, copy pair), so coupled runs agree edge by edge.
    """
    if budget is not None:
        budget.spend()
    if recorder is not None:
        recorder.append(scope)
    ranked = []
    for x in upper:
        for y in H.down_neighbors(x):
            if y in tags:
                continue
            ranked.append((tape.h_edge_rank_bits(y, x, scope), y, x))
    ranked.sort()
    pairs = select_greedy((y, x) for _, y, x in ranked)
    partner: dict[HVertex, HVertex] = {}
    for y, x in pairs:
        partner[y] = x
        partner[x] = y
    return partner


def find_paths(
    H: LayeredGraph,
    S: Iterable[HVertex],
    i: int,
    delta: float,
    tags: dict,
    tape: RandomTape,
    scope: InvocationPath,
    budget: Optional[Budget] = None,
    recorder: Optional[list] = None,
) -> None:
    """Extend vertex-disjoint partial paths from layer-i copies down to layer 0.

    Mutates ``tags``: on return every copy of S carries a pointer or a dead
    end.  The recursion runs ceil(1/delta) rounds per level with delta squared
    below, a loop count that depends only on (i, delta).
    """
    if not 0 < delta <= 1:
        raise ValueError(f"delta must be in (0, 1], got {delta}")
    if i < 1:
        raise ValueError(f"layer index must be >= 1, got {i}")
    live = sorted(S)
    partner = _bipartite_greedy(H, live, tags, tape, scope.child("greedy", 0), budget, recorder)
    if i == 1:
        for u in live:
            w = partner.get(u)
            if w is None:
                tags[u] = DEAD_END
            else:
                tags[u] = w
                tags[w] = PATH_END  # consume the bottom endpoint
        return
    reached = [partner[u] for u in live if u in partner]
    rounds = math.ceil(1 / delta)
    for j in range(rounds):
        find_paths(
            H, reached, i - 1, delta * delta, tags, tape,
            scope.child("iter", j), budget, recorder,
        )
        for v in reached:
            if tags.get(v) is not DEAD_END:
                tags[partner[v]] = v
        live = [u for u in live if u not in tags]
        partner = _bipartite_greedy(
            H, live, tags, tape, scope.child("greedy", j + 1), budget, recorder
        )
        reached = [partner[u] for u in live if u in partner]
    for u in live:
        if u not in tags:
            tags[u] = DEAD_END


def _decode(H: LayeredGraph, tags: dict, top: HVertex) -> tuple[int, ...]:
    verts = [top[1]]
    cur = tags.get(top)
    for _ in range(H.ell):
        assert isinstance(cur, tuple), f"broken pointer chain at {cur!r}"
        verts.append(cur[1])
        verts.append(cur[2])
        cur = tags.get(cur)
    assert isinstance(cur, tuple) and cur[0] == 0, f"chain must end in layer 0, got {cur!r}"
    verts.append(cur[1])
    return tuple(verts)


def augmenting_paths(
    graph: Graph,
    matching: Matching,
    ell: int,
    delta: float,
    tape: RandomTape,
    scope: InvocationPath,
    budget: Optional[Budget] = None,
    recorder: Optional[list] = None,
) -> list[tuple[int, ...]]:
    """One batch of vertex-disjoint augmenting paths of length 2*ell + 1.

    Each returned path is the vertex sequence of an alternating path between
    two free vertices.  Applying them is the caller's job.
    """
    H = build_layered(graph, matching, ell, tape, scope)
    tags: dict = {}
    find_paths(
        H, H.top_copies(), ell + 1, delta, tags, tape, scope, budget, recorder
    )
    paths = []
    for top in H.top_copies():
        if isinstance(tags.get(top), tuple):
            paths.append(_decode(H, tags, top))
    return paths


def validate_augmenting_paths(
    graph: Graph, matching: Matching, paths: Iterable[tuple[int, ...]]
) -> None:
    """Raise ValueError unless the paths are valid, disjoint, and alternating.

    Accepts only proper augmenting paths of odd length >= 3 (a bare free-free
    edge is not accepted by this operation).
    """
    covered = matching.covered()
    used: set[int] = set()
    for p in paths:
        if len(p) < 4 or len(p) % 2 != 0:
            raise ValueError(f"path {p} does not have odd edge count >= 3")
        if len(set(p)) != len(p):
            raise ValueError(f"path {p} repeats a vertex")
        if p[0] in covered or p[-1] in covered:
            raise ValueError(f"path {p} does not end at free vertices")
        for k in range(len(p) - 1):
            e = canon(p[k], p[k + 1])
            if e not in graph.edges:
                raise ValueError(f"path {p} uses non-edge {e}")
            if (k % 2 == 1) != (e in matching.edges):
                raise ValueError(f"path {p} does not alternate at {e}")
        overlap = used.intersection(p)
        if overlap:
            raise ValueError(f"paths overlap at vertices {sorted(overlap)}")
        used.update(p)


def apply_augmentations(
    matching: Matching, paths: Iterable[tuple[int, ...]], graph: Optional[Graph] = None
) -> Matching:
    """Flip the paths into the matching; grows the size by the path count.

    When a graph is given the paths are validated against it first.
    """
    paths = list(paths)
    if graph is not None:
        validate_augmenting_paths(graph, matching, paths)
    edges = set(matching.edges)
    for p in paths:
        if len(p) < 4 or len(p) % 2 != 0:
            raise ValueError(f"path {p} does not have odd edge count >= 3")
        for k in range(len(p) - 1):
            e = canon(p[k], p[k + 1])
            should_be_matched = k % 2 == 1
            if should_be_matched != (e in edges):
                raise ValueError(f"path {p} does not alternate against the matching")
            if should_be_matched:
                edges.discard(e)
            else:
                edges.add(e)
    try:
        result = Matching(frozenset(edges))
    except ValueError:
        raise ValueError("paths overlap or collide with the matching") from None
    if len(result) != len(matching) + len(paths):
        raise ValueError("augmentation did not grow the matching by the path count")
    return result
