"""Randomized (1-eps)-approximate maximum matching by repeated augmentation.

Start from the greedy maximal matching under tape-drawn edge ranks, then for
each path length parameter ell = 1..k run r rounds, each round finding one
batch of vertex-disjoint length-(2*ell+1) augmenting paths and flipping them
in.  Every tape draw is keyed by the (phase, round) invocation path, so the
whole run couples step by step against a run on a perturbed graph.

The closed-form parameters below make k and r grow explosively as eps
shrinks; they document the worst-case analysis, not a practical setting.
Experiments run with explicit overrides (``DESK_PARAMS`` is the default used
by the acceptance experiments).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .graphs import Graph, Matching
from .greedy import EdgeOrder, greedy_matching
from .layered import Budget, augmenting_paths, apply_augmentations
from .tape import InvocationPath, RandomTape, ROOT

__all__ = ["ApproxParams", "params_from_eps", "approx_matching", "DESK_PARAMS"]


@dataclass(frozen=True)
class ApproxParams:
    """Phase count k, rounds per phase r, and per-call loop parameter delta."""

    k: int
    r: int
    delta: float
    eps: Optional[float] = None

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.r < 1:
            raise ValueError(f"r must be >= 1, got {self.r}")
        if not 0 < self.delta <= 1:
            raise ValueError(f"delta must be in (0, 1], got {self.delta}")

    def describe(self) -> dict:
        out = {"k": self.k, "r": self.r, "delta": self.delta}
        if self.eps is not None:
            out["eps"] = self.eps
        return out


def params_from_eps(eps: float) -> ApproxParams:
    """Closed-form parameters for a target approximation gap eps."""
    if not 0 < eps <= 1:
        raise ValueError(f"eps must be in (0, 1], got {eps}")
    k = math.ceil(1 / eps + 1)
    r = 4 * k * k * (16 * k + 20) * (k - 1) * (2 * k) ** k
    delta = 1 / (r * (2 * k + 2))
    return ApproxParams(k=k, r=r, delta=delta, eps=eps)


DESK_PARAMS = ApproxParams(k=2, r=8, delta=0.05)


def approx_matching(
    graph: Graph,
    params: ApproxParams,
    tape: RandomTape,
    budget_limit: int = 10**6,
    record: Optional[list] = None,
    scope: InvocationPath = ROOT,
) -> Matching:
    """Run the full augmentation schedule and return the final matching.

    ``record``, when given, receives one (phase, round, paths_found,
    matching_size, greedy_calls_so_far) tuple per round; the call counts
    depend only on the parameters, never on the graph.
    """
    order = EdgeOrder.from_tape(tape, scope.child("order"))
    matching = greedy_matching(graph, order)
    budget = Budget(budget_limit)
    for ell in range(1, params.k + 1):
        phase_scope = scope.child("phase", ell)
        for i in range(1, params.r + 1):
            round_scope = phase_scope.child("round", i)
            paths = augmenting_paths(
                graph, matching, ell, params.delta, tape, round_scope, budget
            )
            matching = apply_augmentations(matching, paths, graph=graph)
            if record is not None:
                record.append((ell, i, len(paths), matching.size, budget.count))
    return matching
