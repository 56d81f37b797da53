"""Graph representation, generators, perturbations, and distances.

Graphs are immutable, with a fixed identity space: vertices are the integers
``[0, n)`` and stay in place under perturbation.  Deleting a vertex removes
its incident edges but keeps the identity as an isolated vertex, so coupled
runs on a graph and its perturbed copy always talk about the same vertices.

Neighbor lists are sorted ascending by vertex id; "the i-th neighbor of u"
(1-based) used by the probe oracle refers to this order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Union

import numpy as np

from . import tape as _tape

__all__ = [
    "Graph",
    "WeightedGraph",
    "Matching",
    "DeleteEdge",
    "DeleteVertex",
    "Perturbation",
    "ParseError",
    "NotFoundError",
    "canon",
    "load_graph",
    "load_weighted",
    "dump_graph",
    "dump_weighted",
    "gen",
    "gnp",
    "cycle",
    "path",
    "bounded_degree",
    "apply_perturbation",
    "is_matching",
    "is_maximal",
    "hamming",
    "weighted_hamming",
]


class ParseError(ValueError):
    """Malformed edge-list document; the message names the offending line."""


class NotFoundError(LookupError):
    """A referenced vertex, edge, or weight does not exist."""


def canon(u: int, v: int) -> tuple[int, int]:
    """Canonical (min, max) form of an unordered vertex pair."""
    return (u, v) if u <= v else (v, u)


class Graph:
    """Immutable simple undirected graph on the vertex set [0, n)."""

    __slots__ = ("n", "edges", "adj", "m")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]]):
        if n < 0:
            raise ValueError(f"vertex count must be >= 0, got {n}")
        canonical: set[tuple[int, int]] = set()
        neighbor_sets: list[list[int]] = [[] for _ in range(n)]
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) outside vertex range [0, {n})")
            e = canon(u, v)
            if e in canonical:
                raise ValueError(f"duplicate edge {e}")
            canonical.add(e)
            neighbor_sets[e[0]].append(e[1])
            neighbor_sets[e[1]].append(e[0])
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", frozenset(canonical))
        object.__setattr__(self, "adj", tuple(tuple(sorted(ns)) for ns in neighbor_sets))
        object.__setattr__(self, "m", len(canonical))

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("Graph is immutable")

    def __reduce__(self):
        return (Graph, (self.n, tuple(sorted(self.edges))))

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adj[v]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def max_degree(self) -> int:
        return max((len(a) for a in self.adj), default=0)

    def has_edge(self, pair: tuple[int, int]) -> bool:
        return canon(*pair) in self.edges

    def has_vertex(self, v: int) -> bool:
        return 0 <= v < self.n

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Graph) and self.n == other.n and self.edges == other.edges
        )

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


class WeightedGraph:
    """A graph plus one positive weight per edge."""

    __slots__ = ("graph", "weights")

    def __init__(self, graph: Graph, weights: Mapping[tuple[int, int], float]):
        norm: dict[tuple[int, int], float] = {}
        for pair, w in weights.items():
            e = canon(*pair)
            if e not in graph.edges:
                raise ValueError(f"weight given for non-edge {e}")
            if e in norm:
                raise ValueError(f"duplicate weight for edge {e}")
            if not w > 0:
                raise ValueError(f"non-positive weight {w} for edge {e}")
            norm[e] = float(w)
        missing = graph.edges - norm.keys()
        if missing:
            raise ValueError(f"edge {min(missing)} has no weight")
        object.__setattr__(self, "graph", graph)
        object.__setattr__(self, "weights", norm)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("WeightedGraph is immutable")

    def __reduce__(self):
        return (WeightedGraph, (self.graph, self.weights))

    @property
    def n(self) -> int:
        return self.graph.n

    def weight(self, pair: tuple[int, int]) -> float:
        e = canon(*pair)
        try:
            return self.weights[e]
        except KeyError:
            raise NotFoundError(f"no weight for edge {e}") from None

    def max_weight(self) -> float:
        return max(self.weights.values())

    def min_weight(self) -> float:
        return min(self.weights.values())

    def __repr__(self) -> str:
        return f"WeightedGraph(n={self.n}, m={self.graph.m})"


@dataclass(frozen=True)
class Matching:
    """An edge set in which no two edges share a vertex."""

    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        seen: set[int] = set()
        for u, v in self.edges:
            if u in seen or v in seen:
                raise ValueError(f"matching edges share vertex at ({u}, {v})")
            seen.add(u)
            seen.add(v)

    @classmethod
    def of(cls, pairs: Iterable[tuple[int, int]]) -> "Matching":
        return cls(frozenset(canon(u, v) for u, v in pairs))

    @property
    def size(self) -> int:
        return len(self.edges)

    def covered(self) -> frozenset[int]:
        return frozenset(x for e in self.edges for x in e)

    def free_vertices(self, graph: Graph) -> list[int]:
        covered = self.covered()
        return [v for v in range(graph.n) if v not in covered]

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.edges)

    def __len__(self) -> int:
        return len(self.edges)

    def __contains__(self, pair) -> bool:
        return canon(*pair) in self.edges


EMPTY_MATCHING = Matching(frozenset())


@dataclass(frozen=True)
class DeleteEdge:
    edge: tuple[int, int]

    def target(self) -> str:
        return f"edge {canon(*self.edge)}"


@dataclass(frozen=True)
class DeleteVertex:
    vertex: int

    def target(self) -> str:
        return f"vertex {self.vertex}"


Perturbation = Union[DeleteEdge, DeleteVertex]


def apply_perturbation(graph: Graph, p: Perturbation) -> Graph:
    """Delete one edge, or one vertex with all incident edges.

    The vertex identity space is unchanged; a deleted vertex becomes isolated.
    """
    if isinstance(p, DeleteEdge):
        e = canon(*p.edge)
        if e not in graph.edges:
            raise NotFoundError(f"edge {e} not in graph")
        return Graph(graph.n, graph.edges - {e})
    if isinstance(p, DeleteVertex):
        v = p.vertex
        if not graph.has_vertex(v):
            raise NotFoundError(f"vertex {v} not in graph")
        return Graph(graph.n, (e for e in graph.edges if v not in e))
    raise TypeError(f"unknown perturbation {p!r}")


# -- edge-list text format ---------------------------------------------------


def _content_lines(text: str) -> list[tuple[int, str]]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append((lineno, line))
    return out


def _parse_header(lines: list[tuple[int, str]]) -> tuple[int, int]:
    if not lines:
        raise ParseError("empty document: missing 'n m' header")
    lineno, line = lines[0]
    parts = line.split()
    if len(parts) != 2:
        raise ParseError(f"line {lineno}: header must be 'n m', got {line!r}")
    try:
        n, m = int(parts[0]), int(parts[1])
    except ValueError:
        raise ParseError(f"line {lineno}: header must be two integers") from None
    if n < 0 or m < 0:
        raise ParseError(f"line {lineno}: negative counts in header")
    return n, m


def load_graph(text: str) -> Graph:
    """Parse an edge-list document: a header line "n m", then "u v" lines.

    '#' starts a comment.  Rejects self-loops, duplicates, and out-of-range
    ids, naming the offending line.
    """
    lines = _content_lines(text)
    n, m = _parse_header(lines)
    body = lines[1:]
    if len(body) != m:
        raise ParseError(f"header promises {m} edges, found {len(body)}")
    edges = []
    seen: set[tuple[int, int]] = set()
    for lineno, line in body:
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"line {lineno}: expected 'u v', got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"line {lineno}: non-integer vertex id") from None
        if u == v:
            raise ParseError(f"line {lineno}: self-loop at vertex {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise ParseError(f"line {lineno}: vertex id out of range [0, {n})")
        e = canon(u, v)
        if e in seen:
            raise ParseError(f"line {lineno}: duplicate edge {e}")
        seen.add(e)
        edges.append(e)
    return Graph(n, edges)


def load_weighted(text: str) -> WeightedGraph:
    """Parse a weighted edge-list document with "u v w" lines."""
    lines = _content_lines(text)
    n, m = _parse_header(lines)
    body = lines[1:]
    if len(body) != m:
        raise ParseError(f"header promises {m} edges, found {len(body)}")
    edges = []
    weights: dict[tuple[int, int], float] = {}
    for lineno, line in body:
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(f"line {lineno}: expected 'u v w', got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
            w = float(parts[2])
        except ValueError:
            raise ParseError(f"line {lineno}: malformed numbers") from None
        if u == v:
            raise ParseError(f"line {lineno}: self-loop at vertex {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise ParseError(f"line {lineno}: vertex id out of range [0, {n})")
        if not w > 0:
            raise ParseError(f"line {lineno}: non-positive weight {w}")
        e = canon(u, v)
        if e in weights:
            raise ParseError(f"line {lineno}: duplicate edge {e}")
        weights[e] = w
        edges.append(e)
    return WeightedGraph(Graph(n, edges), weights)


def dump_graph(graph: Graph) -> str:
    lines = [f"{graph.n} {graph.m}"]
    lines.extend(f"{u} {v}" for u, v in graph.sorted_edges())
    return "\n".join(lines) + "\n"


def dump_weighted(wgraph: WeightedGraph) -> str:
    g = wgraph.graph
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{u} {v} {wgraph.weights[(u, v)]!r}" for u, v in g.sorted_edges())
    return "\n".join(lines) + "\n"


# -- generators ---------------------------------------------------------------

_GEN_SCOPE = _tape.ROOT.child("generator")


def gnp(n: int, p: float, seed: int) -> Graph:
    """Erdos-Renyi G(n, p); deterministic for fixed (n, p, seed)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0 <= p <= 1:
        raise ValueError(f"p must be in [0, 1], got {p}")
    t = _tape.RandomTape(_tape.fold(seed, _tape.TAG_GENERATOR))
    iu, iv = np.triu_indices(n, k=1)
    bits = t.edge_rank_bits_bulk(iu, iv, _GEN_SCOPE)
    threshold = min(int(p * 2.0**64), (1 << 64) - 1)
    keep = bits < np.uint64(threshold) if threshold > 0 else np.zeros(len(iu), bool)
    return Graph(n, zip(iu[keep].tolist(), iv[keep].tolist()))


def cycle(n: int, seed: int = 0) -> Graph:
    if n < 3:
        raise ValueError(f"cycle needs n >= 3, got {n}")
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def path(n: int, seed: int = 0) -> Graph:
    if n < 1:
        raise ValueError(f"path needs n >= 1, got {n}")
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def bounded_degree(n: int, max_deg: int, seed: int) -> Graph:
    """Random graph with maximum degree <= max_deg.

    Candidate pairs are visited in tape-rank order and kept with probability
    1/2 while both endpoints still have spare degree.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0 <= max_deg < n:
        raise ValueError(f"max degree must satisfy 0 <= max_deg < n, got {max_deg}")
    t = _tape.RandomTape(_tape.fold(seed, _tape.TAG_GENERATOR))
    iu, iv = np.triu_indices(n, k=1)
    bits = t.edge_rank_bits_bulk(iu, iv, _GEN_SCOPE.child("bounded"))
    order = np.argsort(bits, kind="stable")
    deg = [0] * n
    edges = []
    for idx in order.tolist():
        u = int(iu[idx])
        v = int(iv[idx])
        if deg[u] >= max_deg or deg[v] >= max_deg:
            continue
        if bits[idx] & np.uint64(1):
            continue
        deg[u] += 1
        deg[v] += 1
        edges.append((u, v))
    return Graph(n, edges)


def gen(kind: str, seed: int = 0, **params) -> Graph:
    """Dispatch by generator name: gnp, cycle, path, bounded_degree."""
    if kind == "gnp":
        return gnp(params["n"], params["p"], seed)
    if kind == "cycle":
        return cycle(params["n"], seed)
    if kind == "path":
        return path(params["n"], seed)
    if kind == "bounded_degree":
        return bounded_degree(params["n"], params["max_deg"], seed)
    raise ValueError(f"unknown generator kind {kind!r}")


# -- predicates and distances -------------------------------------------------


def _edge_set(m) -> frozenset[tuple[int, int]]:
    if isinstance(m, Matching):
        return m.edges
    return frozenset(canon(u, v) for u, v in m)


def is_matching(graph: Graph, m) -> bool:
    """True iff the edges all exist in the graph and are pairwise disjoint."""
    seen: set[int] = set()
    for u, v in _edge_set(m):
        if canon(u, v) not in graph.edges:
            return False
        if u in seen or v in seen:
            return False
        seen.add(u)
        seen.add(v)
    return True


def is_maximal(graph: Graph, m) -> bool:
    """True iff a matching, and no graph edge has both endpoints free."""
    edges = _edge_set(m)
    if not is_matching(graph, edges):
        return False
    covered = {x for e in edges for x in e}
    return not any(u not in covered and v not in covered for u, v in graph.edges)


def hamming(a, b) -> int:
    """Size of the symmetric difference of two edge sets."""
    return len(_edge_set(a) ^ _edge_set(b))


def weighted_hamming(a, b, weights: Mapping[tuple[int, int], float]) -> float:
    """Total weight of the symmetric difference; every such edge needs a weight."""
    total = 0.0
    for e in _edge_set(a) ^ _edge_set(b):
        try:
            total += weights[e]
        except KeyError:
            raise NotFoundError(f"no weight for edge {e}") from None
    return total
