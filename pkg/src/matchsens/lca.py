"""Deterministic maximal matching for bounded-degree graphs, query-local.

Pipeline: decompose the graph into max-degree oriented forests (one per
neighbor index), 6-color each forest by iterated bit reduction, order edges
by the combined color tuple of their smaller-colored endpoint, and run the
deterministic greedy over that order.  Every stage is a pure function of ids
within a bounded radius, so single-edge membership queries can be answered
through a neighbor-probe oracle without running the global algorithm; the
probe count per query stays small, and outputs agree with the global run on
every edge.

Per-forest coloring, in detail.  Colors start as vertex ids.  Each round a
non-root vertex u with parent v recolors to 2*a + b where a is the least bit
position at which the colors of u and v differ and b is that bit of u's
color; a root recolors to bit 0 of its own color.  The root rule never
collides with a child (if the child's a is 0 its bit 0 differs from the
root's; otherwise its new color is >= 2), so the coloring stays proper every
round.  Rounds run until the worst-case color bound stops shrinking, which
lands all colors in {0..5}.  Finally each root takes the smallest color not
used by its forest children (at most max-degree many), which keeps the color
in {0..5}, makes isolated vertices 0, and preserves properness.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .graphs import Graph, Matching, NotFoundError, canon
from .greedy import select_greedy

__all__ = [
    "ForestDecomposition",
    "Coloring",
    "ProbeOracle",
    "form_forests",
    "color_forests",
    "coloring_to_mm",
    "deterministic_mm",
    "mm_query",
    "reduction_rounds",
    "probe_bound",
]


@dataclass(frozen=True)
class ForestDecomposition:
    """One oriented forest per neighbor index; parents[i][u] is u's parent."""

    n: int
    parents: tuple[tuple[Optional[int], ...], ...]

    @property
    def width(self) -> int:
        return len(self.parents)

    def edge_sets(self) -> list[set[tuple[int, int]]]:
        return [
            {(u, p) for u, p in enumerate(forest) if p is not None}
            for forest in self.parents
        ]


@dataclass(frozen=True)
class Coloring:
    """Per-vertex tuples of per-forest colors, each color in {0..5}."""

    colors: tuple[tuple[int, ...], ...]

    def of(self, v: int) -> tuple[int, ...]:
        return self.colors[v]

    def forest_colors(self, i: int) -> list[int]:
        return [t[i] for t in self.colors]


def form_forests(graph: Graph, max_deg: int) -> ForestDecomposition:
    """Split edges into max_deg forests oriented from lower to higher id.

    Edge {u, v} with u < v lands in forest i iff v is u's i-th neighbor
    (1-based, ascending id order).
    """
    for v in range(graph.n):
        if graph.degree(v) > max_deg:
            raise ValueError(
                f"vertex {v} has degree {graph.degree(v)} > {max_deg}"
            )
    parents: list[list[Optional[int]]] = [
        [None] * graph.n for _ in range(max_deg)
    ]
    for u in range(graph.n):
        for i, v in enumerate(graph.neighbors(u)):
            if u < v:
                parents[i][u] = v
    return ForestDecomposition(graph.n, tuple(tuple(f) for f in parents))


def reduction_rounds(n: int) -> int:
    """Rounds of color reduction until the color bound stops shrinking."""
    bound = max(n - 1, 0)
    rounds = 0
    while bound > 5:
        bound = 2 * (bound.bit_length() - 1) + 1
        rounds += 1
    return rounds


def _reduce_step(cu: int, cv: int) -> int:
    """One bit-reduction step of a child color against its parent color."""
    diff = cu ^ cv
    assert diff, "child and parent colors must differ"
    a = (diff & -diff).bit_length() - 1
    b = (cu >> a) & 1
    return 2 * a + b


def _root_repair(children_colors) -> int:
    c = 0
    used = set(children_colors)
    while c in used:
        c += 1
    return c


def color_forests(forests: ForestDecomposition) -> Coloring:
    """6-color every forest; proper on each forest, hence on the graph."""
    n = forests.n
    rounds = reduction_rounds(n)
    per_forest: list[list[int]] = []
    for parent in forests.parents:
        phi = list(range(n))
        for _ in range(rounds):
            phi = [
                _reduce_step(phi[u], phi[parent[u]])
                if parent[u] is not None
                else phi[u] & 1
                for u in range(n)
            ]
        children: dict[int, list[int]] = {}
        for u, p in enumerate(parent):
            if p is not None:
                children.setdefault(p, []).append(phi[u])
        final = [
            _root_repair(children.get(u, ())) if parent[u] is None else phi[u]
            for u in range(n)
        ]
        assert all(0 <= c <= 5 for c in final), "colors must land in {0..5}"
        per_forest.append(final)
    return Coloring(tuple(tuple(f[v] for f in per_forest) for v in range(n)))


def _edge_key(coloring: Coloring, e: tuple[int, int]):
    u, v = e
    return (min(coloring.of(u), coloring.of(v)), e)


def coloring_to_mm(graph: Graph, coloring: Coloring) -> Matching:
    """Deterministic greedy over edges ordered by endpoint color then ids."""
    for u, v in graph.edges:
        if coloring.of(u) == coloring.of(v):
            raise ValueError(f"coloring is not proper on edge ({u}, {v})")
    edges = sorted(graph.edges, key=lambda e: _edge_key(coloring, e))
    return Matching(frozenset(select_greedy(edges)))


def deterministic_mm(graph: Graph) -> Matching:
    """Forest decomposition, coloring, then color-ordered greedy."""
    max_deg = graph.max_degree()
    if max_deg == 0:
        return Matching(frozenset())
    return coloring_to_mm(graph, color_forests(form_forests(graph, max_deg)))


# -- query-local evaluation ----------------------------------------------------


class ProbeOracle:
    """Neighbor-probe access to a graph: probe(v, i) is the i-th neighbor.

    The counter increments once per probe call; answers follow the sorted
    neighbor order.  ``max_deg`` is the degree bound promised to queries.
    """

    __slots__ = ("graph", "max_deg", "probes")

    def __init__(self, graph: Graph, max_deg: Optional[int] = None):
        self.graph = graph
        self.max_deg = graph.max_degree() if max_deg is None else max_deg
        if graph.max_degree() > self.max_deg:
            raise ValueError(
                f"graph degree {graph.max_degree()} exceeds promised bound {self.max_deg}"
            )
        self.probes = 0

    def probe(self, v: int, i: int) -> Optional[int]:
        if i < 1:
            raise ValueError(f"probe index is 1-based, got {i}")
        self.probes += 1
        adj = self.graph.adj[v]
        return adj[i - 1] if i <= len(adj) else None


def probe_bound(n: int, max_deg: int) -> int:
    """Structural cap on probes used by one color-tuple query.

    A query reads the neighbor lists of at most max_deg ancestor chains of
    length rounds+1, plus the children of a root, plus the vertex itself; a
    list costs at most max_deg+1 probes.
    """
    rounds = reduction_rounds(n)
    return (max_deg + 1) * (max_deg * (rounds + 1) + max_deg + 1)


class _QueryContext:
    """Memoized per-query evaluation over a probe oracle."""

    def __init__(self, oracle: ProbeOracle, probed: Optional[set] = None):
        self.oracle = oracle
        self.n = oracle.graph.n
        self.rounds = reduction_rounds(self.n)
        self.width = oracle.max_deg
        self._nbr_cache: dict[int, tuple[int, ...]] = {}
        self._color_cache: dict[int, tuple[int, ...]] = {}
        self._member_cache: dict[tuple[int, int], bool] = {}
        self.probed = probed

    def neighbors(self, v: int) -> tuple[int, ...]:
        got = self._nbr_cache.get(v)
        if got is None:
            out = []
            for i in range(1, self.width + 1):
                w = self.oracle.probe(v, i)
                if w is None:
                    break
                out.append(w)
            got = tuple(out)
            self._nbr_cache[v] = got
            if self.probed is not None:
                self.probed.add(v)
        return got

    def _parent(self, v: int, i: int) -> Optional[int]:
        nbrs = self.neighbors(v)
        if i < len(nbrs) and nbrs[i] > v:
            return nbrs[i]
        return None

    def _dp_color(self, chain: list[int], root_end: bool) -> int:
        """Roll colors forward along an ancestor chain (ids at round 0).

        With ``root_end`` the last chain entry is a root and follows the root
        rule each round.  A truncated chain (no root within reach) loses its
        deepest entry every round; the surviving prefix is all the computation
        of the first entry's color ever reads.
        """
        phi = list(chain)
        for t in range(1, self.rounds + 1):
            upto = len(chain) if root_end else len(chain) - t
            nxt = []
            for j in range(upto):
                if j + 1 < len(phi):
                    nxt.append(_reduce_step(phi[j], phi[j + 1]))
                else:
                    nxt.append(phi[j] & 1)
            phi = nxt
        return phi[0]

    def _forest_color(self, v: int, i: int) -> int:
        chain = [v]
        root_end = False
        while len(chain) <= self.rounds:
            p = self._parent(chain[-1], i)
            if p is None:
                root_end = True
                break
            chain.append(p)
        if not root_end and self._parent(chain[-1], i) is None:
            root_end = True
        color = self._dp_color(chain, root_end)
        if root_end and len(chain) == 1:
            # v is a root: repair against its forest children's final colors.
            child_colors = [
                self._dp_color([w, v], True)
                for w in self.neighbors(v)
                if w < v and self._parent(w, i) == v
            ]
            color = _root_repair(child_colors)
        return color

    def color(self, v: int) -> tuple[int, ...]:
        got = self._color_cache.get(v)
        if got is None:
            got = tuple(self._forest_color(v, i) for i in range(self.width))
            self._color_cache[v] = got
        return got

    def in_matching(self, e: tuple[int, int]) -> bool:
        # Greedy fixed point: e is matched iff every adjacent edge of
        # strictly smaller key is unmatched.  Evaluated iteratively; keys
        # strictly decrease along dependencies, so this terminates.
        e = canon(*e)
        stack = [e]
        while stack:
            cur = stack[-1]
            if cur in self._member_cache:
                stack.pop()
                continue
            key = self._key(cur)
            deps = [
                f
                for f in self._adjacent(cur)
                if self._key(f) < key and f not in self._member_cache
            ]
            if deps:
                stack.extend(deps)
                continue
            stack.pop()
            self._member_cache[cur] = not any(
                self._member_cache[f]
                for f in self._adjacent(cur)
                if self._key(f) < key
            )
        return self._member_cache[e]

    def _adjacent(self, e: tuple[int, int]) -> list[tuple[int, int]]:
        out = []
        for x in e:
            for y in self.neighbors(x):
                f = canon(x, y)
                if f != e:
                    out.append(f)
        return out

    def _key(self, e: tuple[int, int]):
        return (min(self.color(e[0]), self.color(e[1])), e)


def mm_query(
    oracle: ProbeOracle,
    e: tuple[int, int],
    probed: Optional[set] = None,
) -> tuple[bool, int]:
    """Answer whether ``e`` is in the deterministic matching, plus probes used.

    Agrees with :func:`deterministic_mm` on every edge.  Probe results are
    memoized within the query; ``probed``, when given, collects the vertices
    whose neighbor lists were read (for locality instrumentation).
    """
    e = canon(*e)
    if not oracle.graph.has_edge(e):
        raise NotFoundError(f"edge {e} not in graph")
    before = oracle.probes
    ctx = _QueryContext(oracle, probed)
    answer = ctx.in_matching(e)
    return answer, oracle.probes - before
