"""Coupled-run sensitivity measurement and lower-bound demonstrators.

For each perturbation p and each trial, the harness runs the algorithm on
the instance and on the perturbed instance with the *same* tape (seed derived
from the base seed and the trial index) and records the Hamming distance of
the two outputs.  The shared tape is one admissible coupling of the two
output distributions, so the per-perturbation mean estimates an upper bound
on the earth mover's distance between them; reports label the quantity
``coupled-EMD-upper-bound`` to keep the claim precise.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .approx import ApproxParams, approx_matching
from .graphs import (
    DeleteEdge,
    DeleteVertex,
    Graph,
    Matching,
    Perturbation,
    WeightedGraph,
    apply_perturbation,
    canon,
    cycle,
    dump_graph,
    dump_weighted,
    hamming,
    path,
    weighted_hamming,
)
from .greedy import EdgeOrder, change_set, greedy_matching, select_greedy
from .lca import deterministic_mm
from .tape import RandomTape, ROOT, derive_seed, fold
from .weighted import weighted_matching

__all__ = [
    "GreedyRunner",
    "ApproxRunner",
    "WeightedRunner",
    "LocalRunner",
    "SensitivityReport",
    "estimate",
    "default_perturbations",
    "adversarial_greedy_instance",
    "randomized_lb_experiment",
    "coupled_greedy_vertex_study",
]

_GREEDY_SCOPE = ROOT.child("order")

Instance = Union[Graph, WeightedGraph]


def _graph_of(instance: Instance) -> Graph:
    return instance.graph if isinstance(instance, WeightedGraph) else instance


def _perturb_instance(instance: Instance, p: Perturbation) -> Instance:
    g = apply_perturbation(_graph_of(instance), p)
    if isinstance(instance, WeightedGraph):
        return WeightedGraph(g, {e: instance.weights[e] for e in g.edges})
    return g


class GreedyRunner:
    """Greedy maximal matching under tape-drawn edge ranks."""

    algorithm_id = "greedy"

    def params(self) -> dict:
        return {}

    def run(self, graph: Graph, tape: RandomTape) -> Matching:
        return greedy_matching(graph, EdgeOrder.from_tape(tape, _GREEDY_SCOPE))

    def coupled_outputs(self, instance, perturbations, perturbed, tape):
        graph = _graph_of(instance)
        sorted_edges = _sorted_by_rank(graph, tape)
        base = Matching(frozenset(select_greedy(sorted_edges)))
        outs = []
        for p in perturbations:
            if isinstance(p, DeleteVertex):
                kept = [e for e in sorted_edges if p.vertex not in e]
            else:
                e0 = canon(*p.edge)
                kept = [e for e in sorted_edges if e != e0]
            outs.append(Matching(frozenset(select_greedy(kept))))
        return base, outs


def _sorted_by_rank(graph: Graph, tape: RandomTape) -> list[tuple[int, int]]:
    order = EdgeOrder.from_tape(tape, _GREEDY_SCOPE)
    edges = sorted(graph.edges)
    order.ensure_bulk(edges)
    ranks = order._ranks
    return [e for _, e in sorted((ranks[e], e) for e in edges)]


@dataclass(frozen=True)
class ApproxRunner:
    """The augmentation-based (1-eps)-approximation driver."""

    approx_params: ApproxParams
    budget_limit: int = 10**6

    algorithm_id = "approx"

    def params(self) -> dict:
        out = self.approx_params.describe()
        out["budget"] = self.budget_limit
        return out

    def run(self, graph: Graph, tape: RandomTape) -> Matching:
        return approx_matching(graph, self.approx_params, tape, self.budget_limit)

    def coupled_outputs(self, instance, perturbations, perturbed, tape):
        base = self.run(_graph_of(instance), tape)
        return base, [self.run(_graph_of(pg), tape) for pg in perturbed]


@dataclass(frozen=True)
class WeightedRunner:
    """Weight-bucketed greedy matching; instances must be weighted."""

    alpha: float

    algorithm_id = "weighted"

    def params(self) -> dict:
        return {"alpha": self.alpha}

    def run(self, wgraph: WeightedGraph, tape: RandomTape) -> Matching:
        return weighted_matching(wgraph, self.alpha, tape)

    def coupled_outputs(self, instance, perturbations, perturbed, tape):
        base = self.run(instance, tape)
        return base, [self.run(pg, tape) for pg in perturbed]


class LocalRunner:
    """Deterministic bounded-degree matcher; ignores the tape entirely."""

    algorithm_id = "lca"

    def params(self) -> dict:
        return {}

    def run(self, graph: Graph, tape: RandomTape) -> Matching:
        return deterministic_mm(graph)

    def coupled_outputs(self, instance, perturbations, perturbed, tape):
        base = self.run(_graph_of(instance), None)
        return base, [self.run(_graph_of(pg), None) for pg in perturbed]


def _target_doc(p: Perturbation) -> dict:
    if isinstance(p, DeleteEdge):
        return {"kind": "delete_edge", "edge": list(canon(*p.edge))}
    return {"kind": "delete_vertex", "vertex": p.vertex}


@dataclass(frozen=True)
class PerturbationStats:
    target: Perturbation
    mean: float
    se: float
    max: float
    raw: Optional[tuple[float, ...]] = None


@dataclass(frozen=True)
class SensitivityReport:
    """Per-perturbation coupled-distance statistics plus aggregates."""

    algorithm: str
    params: dict
    mode: str
    graph_digest: str
    base_seed: int
    trials: int
    sample_policy: str
    perturbations: tuple[PerturbationStats, ...]

    @property
    def worst_case(self) -> float:
        return max((s.mean for s in self.perturbations), default=0.0)

    @property
    def average(self) -> float:
        means = [s.mean for s in self.perturbations]
        return float(sum(means) / len(means)) if means else 0.0

    def to_doc(self) -> dict:
        return {
            "schema": "sensitivity-report/1",
            "quantity": "coupled-EMD-upper-bound",
            "algorithm": self.algorithm,
            "params": self.params,
            "mode": self.mode,
            "graph_digest": self.graph_digest,
            "seeds": {"base_seed": self.base_seed, "trials": self.trials},
            "sample": {
                "policy": self.sample_policy,
                "size": len(self.perturbations),
            },
            "perturbations": [
                {
                    "target": _target_doc(s.target),
                    "mean": s.mean,
                    "se": s.se,
                    "max": s.max,
                    **({"raw": list(s.raw)} if s.raw is not None else {}),
                }
                for s in self.perturbations
            ],
            "worst_case": self.worst_case,
            "average": self.average,
        }

    def to_json_bytes(self) -> bytes:
        return (
            json.dumps(self.to_doc(), sort_keys=True, separators=(",", ":")) + "\n"
        ).encode()

    def to_csv_rows(self) -> list[list]:
        rows = [["kind", "target", "mean", "se", "max"]]
        for s in self.perturbations:
            doc = _target_doc(s.target)
            target = (
                f"{doc['edge'][0]}-{doc['edge'][1]}"
                if doc["kind"] == "delete_edge"
                else str(doc["vertex"])
            )
            rows.append([doc["kind"], target, repr(s.mean), repr(s.se), repr(s.max)])
        return rows


def instance_digest(instance: Instance) -> str:
    text = (
        dump_weighted(instance)
        if isinstance(instance, WeightedGraph)
        else dump_graph(instance)
    )
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def _validate_mode(instance: Instance, perturbations, mode: str) -> None:
    if mode not in ("unweighted", "weighted", "normalized"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode != "unweighted" and not isinstance(instance, WeightedGraph):
        raise ValueError(f"mode {mode!r} needs a weighted instance")
    if mode == "normalized" and not all(
        isinstance(p, DeleteEdge) for p in perturbations
    ):
        raise ValueError("normalized mode is defined for edge deletions only")


def _distance(mode: str, instance, p, base: Matching, out: Matching) -> float:
    if mode == "unweighted":
        return float(hamming(base, out))
    d = weighted_hamming(base, out, instance.weights)
    if mode == "normalized":
        d /= instance.weight(p.edge)
    return d


def _trial_block(args) -> list[list[float]]:
    runner, instance, perturbations, perturbed, mode, base_seed, lo, hi = args
    block = []
    for t in range(lo, hi):
        tape = RandomTape(derive_seed(base_seed, t))
        base, outs = runner.coupled_outputs(instance, perturbations, perturbed, tape)
        block.append(
            [
                _distance(mode, instance, p, base, out)
                for p, out in zip(perturbations, outs)
            ]
        )
    return block


def estimate(
    runner,
    instance: Instance,
    perturbations: Sequence[Perturbation],
    trials: int,
    base_seed: int,
    mode: str = "unweighted",
    include_raw: bool = False,
    sample_policy: str = "explicit",
    jobs: int = 1,
) -> SensitivityReport:
    """Coupled-run distance statistics for every perturbation.

    Each trial derives its tape from (base_seed, trial index) and runs the
    algorithm on the instance and on every perturbed instance with that one
    tape.  Results are reduced in (perturbation, trial) order, so the report
    bytes do not depend on ``jobs``.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    perturbations = list(perturbations)
    graph = _graph_of(instance)
    for p in perturbations:
        if isinstance(p, DeleteEdge) and not graph.has_edge(p.edge):
            raise ValueError(f"perturbation deletes missing edge {canon(*p.edge)}")
        if isinstance(p, DeleteVertex) and not graph.has_vertex(p.vertex):
            raise ValueError(f"perturbation deletes missing vertex {p.vertex}")
    _validate_mode(instance, perturbations, mode)
    perturbed = [_perturb_instance(instance, p) for p in perturbations]

    if jobs > 1 and trials > 1:
        bounds = np.linspace(0, trials, min(jobs, trials) + 1, dtype=int)
        tasks = [
            (runner, instance, perturbations, perturbed, mode, base_seed, int(lo), int(hi))
            for lo, hi in zip(bounds[:-1], bounds[1:])
            if hi > lo
        ]
        with ProcessPoolExecutor(max_workers=len(tasks)) as pool:
            blocks = list(pool.map(_trial_block, tasks))
        rows = [row for block in blocks for row in block]
    else:
        rows = _trial_block(
            (runner, instance, perturbations, perturbed, mode, base_seed, 0, trials)
        )

    matrix = np.asarray(rows, dtype=float).reshape(trials, len(perturbations))
    stats = []
    for j, p in enumerate(perturbations):
        col = matrix[:, j]
        se = float(col.std(ddof=1) / np.sqrt(trials)) if trials > 1 else 0.0
        stats.append(
            PerturbationStats(
                target=p,
                mean=float(col.mean()),
                se=se,
                max=float(col.max()),
                raw=tuple(float(x) for x in col) if include_raw else None,
            )
        )
    return SensitivityReport(
        algorithm=runner.algorithm_id,
        params=runner.params(),
        mode=mode,
        graph_digest=instance_digest(instance),
        base_seed=base_seed,
        trials=trials,
        sample_policy=sample_policy,
        perturbations=tuple(stats),
    )


def default_perturbations(
    instance: Instance, kind: str, base_seed: int, cap: int = 512
) -> tuple[list[Perturbation], str]:
    """Full sweep when at most ``cap`` targets exist, else a seeded sample."""
    graph = _graph_of(instance)
    targets: list[Perturbation] = []
    if kind in ("edges", "both"):
        targets.extend(DeleteEdge(e) for e in graph.sorted_edges())
    if kind in ("vertices", "both"):
        targets.extend(DeleteVertex(v) for v in range(graph.n))
    if kind not in ("edges", "vertices", "both"):
        raise ValueError(f"unknown perturbation kind {kind!r}")
    if len(targets) <= cap:
        return targets, "full"
    keyed = sorted(range(len(targets)), key=lambda i: (fold(base_seed, i), i))
    chosen = sorted(keyed[:cap])
    return [targets[i] for i in chosen], f"sampled-{cap}"


# -- experiment harness used by the greedy studies ----------------------------


def coupled_greedy_vertex_study(
    graph: Graph,
    vertices: Sequence[int],
    trials: int,
    base_seed: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Per (vertex, trial): coupled Hamming distance and change-set size.

    Returns two (len(vertices), trials) arrays: distances between the greedy
    outputs on the graph and on each vertex-deleted graph under the shared
    tape, and the sizes of the corresponding change sets.
    """
    d = np.zeros((len(vertices), trials))
    s = np.zeros((len(vertices), trials))
    for t in range(trials):
        tape = RandomTape(derive_seed(base_seed, t))
        order = EdgeOrder.from_tape(tape, _GREEDY_SCOPE)
        sorted_edges = _sorted_by_rank(graph, tape)
        base = frozenset(select_greedy(sorted_edges))
        matching = Matching(base)
        for j, v in enumerate(vertices):
            out = frozenset(select_greedy([e for e in sorted_edges if v not in e]))
            d[j, t] = len(base ^ out)
            s[j, t] = len(change_set(graph, v, order, matching=matching))
    return d, s


# -- lower-bound demonstrators -------------------------------------------------


def adversarial_greedy_instance(
    n: int,
) -> tuple[Graph, EdgeOrder, Perturbation]:
    """Path with ranks increasing along it; deleting the first edge flips
    the whole alternation, so the coupled distance is n-1 >= n-3."""
    if n < 4:
        raise ValueError(f"n must be >= 4, got {n}")
    g = path(n)
    order = EdgeOrder.from_sequence([(i, i + 1) for i in range(n - 1)])
    return g, order, DeleteEdge((0, 1))


def randomized_lb_experiment(
    eps: float,
    runner,
    trials: int,
    base_seed: int = 0,
) -> dict:
    """Even-cycle demonstrator: how far outputs move when one edge of the
    likelier perfect matching is deleted.  Report only; asserts nothing."""
    length = round(1 / (10 * eps))
    if length % 2 != 0:
        raise ValueError(f"1/(10*eps) rounds to odd {length}; need an even cycle")
    if length < 4:
        raise ValueError(f"cycle length {length} too short; need >= 4")
    g = cycle(length)
    even = frozenset(canon(i, (i + 1) % length) for i in range(0, length, 2))
    odd = frozenset(canon(i, (i + 1) % length) for i in range(1, length, 2))
    hits = {0: 0, 1: 0}
    for t in range(trials):
        out = runner.run(g, RandomTape(derive_seed(base_seed, t))).edges
        if out == even:
            hits[0] += 1
        elif out == odd:
            hits[1] += 1
    likelier = even if hits[0] >= hits[1] else odd
    target = DeleteEdge(min(likelier))
    report = estimate(runner, g, [target], trials, base_seed)
    return {
        "cycle_length": length,
        "eps": eps,
        "perfect_matching_frequency": {"even": hits[0], "odd": hits[1]},
        "deleted_edge": list(canon(*target.edge)),
        "coupled_mean_distance": report.perturbations[0].mean,
        "se": report.perturbations[0].se,
        "trials": trials,
    }
