"""Vertex-arrival online matching with replacement accounting.

A stream fixes a final graph and an arrival order over its vertices; the
prefix graph after i arrivals contains exactly the edges with both endpoints
arrived.  The simulator recomputes the matching from scratch on every prefix
with one fixed tape, so the per-step randomness is identity-keyed and
arrival-independent; the number of edges changed between consecutive outputs
is the replacement count.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

from .graphs import Graph, Matching, hamming
from .tape import RandomTape, fold

__all__ = ["VertexArrivalStream", "ReplacementTrace", "simulate"]


@dataclass(frozen=True)
class VertexArrivalStream:
    """Final graph plus a permutation of its vertices (the arrival order)."""

    graph: Graph
    order: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.order) != list(range(self.graph.n)):
            raise ValueError("arrival order must be a permutation of the vertices")

    @classmethod
    def by_id(cls, graph: Graph) -> "VertexArrivalStream":
        return cls(graph, tuple(range(graph.n)))

    @classmethod
    def shuffled(cls, graph: Graph, seed: int) -> "VertexArrivalStream":
        keys = sorted(range(graph.n), key=lambda v: (fold(seed, v), v))
        return cls(graph, tuple(keys))

    def prefix(self, i: int) -> Graph:
        """Induced graph on the first i arrivals (identity space unchanged)."""
        arrived = set(self.order[:i])
        return Graph(
            self.graph.n,
            (e for e in self.graph.edges if e[0] in arrived and e[1] in arrived),
        )


@dataclass(frozen=True)
class ReplacementTrace:
    """Sizes and per-arrival replacement counts of one simulated stream."""

    algorithm: str
    seed: int
    arrival_order: tuple[int, ...]
    sizes: tuple[int, ...]
    replacements: tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.replacements)

    def to_json_bytes(self) -> bytes:
        doc = {
            "schema": "replacement-trace/1",
            "algorithm": self.algorithm,
            "seed": self.seed,
            "arrival_order": list(self.arrival_order),
            "sizes": list(self.sizes),
            "replacements": list(self.replacements),
            "total": self.total,
        }
        return (json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n").encode()


def simulate(
    stream: VertexArrivalStream,
    runner,
    tape: RandomTape,
    matchings_out: list = None,
) -> ReplacementTrace:
    """Recompute the runner's matching on every prefix and count replacements.

    ``runner`` is any object with ``algorithm_id`` and ``run(graph, tape)``
    whose tape scopes do not depend on the graph (the fixed-randomness
    device); greedy and the approximation driver both qualify.
    """
    previous: Matching = Matching(frozenset())
    sizes = []
    replacements = []
    arrived: set[int] = set()
    edges: list[tuple[int, int]] = []
    remaining = {v: [e for e in stream.graph.edges if v in e] for v in stream.order}
    for v in stream.order:
        arrived.add(v)
        for e in remaining[v]:
            if e[0] in arrived and e[1] in arrived:
                edges.append(e)
        current = runner.run(Graph(stream.graph.n, edges), tape)
        sizes.append(current.size)
        replacements.append(hamming(previous, current))
        if matchings_out is not None:
            matchings_out.append(current)
        previous = current
    return ReplacementTrace(
        algorithm=runner.algorithm_id,
        seed=tape.seed,
        arrival_order=stream.order,
        sizes=tuple(sizes),
        replacements=tuple(replacements),
    )
