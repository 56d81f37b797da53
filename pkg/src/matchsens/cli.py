"""Batch command-line front end.

Subcommands: ``gen`` (graph generation), ``match`` (run one algorithm),
``sens`` (coupled sensitivity report), ``online`` (vertex-arrival
simulation), ``lb`` (lower-bound demonstrators), ``oracle`` (exact optimum).
All randomized commands are reproducible from their printed seed and
parameters.  Exit codes: 0 success, 1 usage error, 2 budget or guard error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path
from typing import Optional

from . import graphs, oracle
from .approx import ApproxParams, DESK_PARAMS, params_from_eps
from .graphs import (
    Graph,
    NotFoundError,
    ParseError,
    WeightedGraph,
    dump_graph,
    load_graph,
    load_weighted,
)
from .layered import BudgetExceededError
from .lca import ProbeOracle, deterministic_mm, mm_query
from .online import VertexArrivalStream, simulate
from .oracle import OracleGuardError
from .sensitivity import (
    ApproxRunner,
    GreedyRunner,
    LocalRunner,
    WeightedRunner,
    adversarial_greedy_instance,
    default_perturbations,
    estimate,
    randomized_lb_experiment,
)
from .tape import RandomTape

USAGE_ERROR = 1
GUARD_ERROR = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def _write_output(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_bytes(text.encode())


def _write_bytes(data: bytes, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(data.decode())
    else:
        Path(out).write_bytes(data)


def _load_any(path: str, weighted: bool):
    text = Path(path).read_text()
    return load_weighted(text) if weighted else load_graph(text)


def _approx_params(args) -> ApproxParams:
    explicit = [args.k, args.r, args.delta]
    if any(x is not None for x in explicit):
        if not all(x is not None for x in explicit):
            raise _UsageError("--k, --r, --delta must be given together")
        return ApproxParams(k=args.k, r=args.r, delta=args.delta)
    if args.eps is not None:
        return params_from_eps(args.eps)
    return DESK_PARAMS


def _runner_for(args):
    alg = args.alg
    if alg == "greedy":
        return GreedyRunner(), False
    if alg == "approx":
        return ApproxRunner(_approx_params(args), args.budget), False
    if alg == "lca":
        return LocalRunner(), False
    if alg == "weighted":
        return WeightedRunner(args.alpha), True
    raise _UsageError(f"unknown algorithm {alg!r}")


def build_parser() -> _Parser:
    top = _Parser(prog="matchsens", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="generate a graph as an edge list")
    p_gen.add_argument("kind", choices=["gnp", "cycle", "path", "bounded_degree"])
    p_gen.add_argument("--n", type=int, required=True)
    p_gen.add_argument("--p", type=float, default=0.1)
    p_gen.add_argument("--max-deg", type=int, default=3)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--out")

    p_match = sub.add_parser("match", help="run one matching algorithm")
    p_match.add_argument("alg", choices=["greedy", "approx", "lca", "weighted"])
    p_match.add_argument("--graph", required=True)
    p_match.add_argument("--seed", type=int, default=0)
    p_match.add_argument("--eps", type=float)
    p_match.add_argument("--k", type=int)
    p_match.add_argument("--r", type=int)
    p_match.add_argument("--delta", type=float)
    p_match.add_argument("--alpha", type=float, default=3.0)
    p_match.add_argument("--budget", type=int, default=10**6)
    p_match.add_argument("--delta-max", type=int, default=5,
                         help="refuse lca runs above this max degree")
    p_match.add_argument("--probe-report",
                         help="lca only: write per-edge probe counts as JSON")
    p_match.add_argument("--out")

    p_sens = sub.add_parser("sens", help="coupled sensitivity report")
    p_sens.add_argument("--alg", required=True,
                        choices=["greedy", "approx", "lca", "weighted"])
    p_sens.add_argument("--graph", required=True)
    p_sens.add_argument("--trials", type=int, default=100)
    p_sens.add_argument("--seed", type=int, default=0)
    p_sens.add_argument("--perturb", choices=["edges", "vertices", "both"],
                        default="edges")
    p_sens.add_argument("--mode", choices=["unweighted", "weighted", "normalized"],
                        default="unweighted")
    p_sens.add_argument("--eps", type=float)
    p_sens.add_argument("--k", type=int)
    p_sens.add_argument("--r", type=int)
    p_sens.add_argument("--delta", type=float)
    p_sens.add_argument("--alpha", type=float, default=3.0)
    p_sens.add_argument("--budget", type=int, default=10**6)
    p_sens.add_argument("--raw", action="store_true", help="retain raw distances")
    p_sens.add_argument("--jobs", type=int, default=1)
    p_sens.add_argument("--format", choices=["json", "csv"], default="json")
    p_sens.add_argument("--out")

    p_online = sub.add_parser("online", help="vertex-arrival replacement trace")
    p_online.add_argument("--graph", required=True)
    p_online.add_argument("--alg", choices=["greedy", "approx"], default="greedy")
    p_online.add_argument("--arrival-order", choices=["random", "id", "file"],
                          default="random")
    p_online.add_argument("--order-file")
    p_online.add_argument("--seed", type=int, default=0)
    p_online.add_argument("--eps", type=float)
    p_online.add_argument("--k", type=int)
    p_online.add_argument("--r", type=int)
    p_online.add_argument("--delta", type=float)
    p_online.add_argument("--budget", type=int, default=10**6)
    p_online.add_argument("--out")

    p_lb = sub.add_parser("lb", help="lower-bound demonstrators")
    p_lb.add_argument("kind", choices=["greedy", "randomized"])
    p_lb.add_argument("--n", type=int, default=10)
    p_lb.add_argument("--eps", type=float, default=1 / 40)
    p_lb.add_argument("--trials", type=int, default=200)
    p_lb.add_argument("--seed", type=int, default=0)
    p_lb.add_argument("--out")

    p_oracle = sub.add_parser("oracle", help="exact optimum for small graphs")
    p_oracle.add_argument("--graph", required=True)
    p_oracle.add_argument("--weighted", action="store_true")
    p_oracle.add_argument("--max-n", type=int, default=24)
    p_oracle.add_argument("--out")

    return top


def _cmd_gen(args) -> int:
    g = graphs.gen(
        args.kind, seed=args.seed, n=args.n, p=args.p, max_deg=args.max_deg
    )
    _write_output(dump_graph(g), args.out)
    return 0


def _matching_text(header: str, edges) -> str:
    lines = [header]
    lines.extend(f"{u} {v}" for u, v in sorted(edges))
    return "\n".join(lines) + "\n"


def _cmd_match(args) -> int:
    runner, needs_weights = _runner_for(args)
    instance = _load_any(args.graph, needs_weights)
    if args.alg == "lca":
        g = instance
        if g.max_degree() > args.delta_max:
            raise OracleGuardError(
                f"max degree {g.max_degree()} exceeds --delta-max {args.delta_max}"
            )
        m = runner.run(g, None)
        if args.probe_report:
            per_query = []
            probes = ProbeOracle(g)
            for e in g.sorted_edges():
                _, used = mm_query(probes, e)
                per_query.append({"edge": list(e), "probes": used})
            counts = [q["probes"] for q in per_query] or [0]
            doc = {
                "per_query": per_query,
                "max": max(counts),
                "mean": sum(counts) / len(counts),
            }
            Path(args.probe_report).write_bytes(
                (json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n").encode()
            )
    else:
        m = runner.run(instance, RandomTape(args.seed))
    if args.alg == "weighted":
        total = sum(instance.weights[e] for e in m.edges)
        header = f"# seed={args.seed} alg={args.alg} size={m.size} weight={total!r}"
    else:
        header = f"# seed={args.seed} alg={args.alg} size={m.size}"
    _write_output(_matching_text(header, m.edges), args.out)
    return 0


def _cmd_sens(args) -> int:
    runner, needs_weights = _runner_for(args)
    needs_weights = needs_weights or args.mode != "unweighted"
    instance = _load_any(args.graph, needs_weights)
    perts, policy = default_perturbations(instance, args.perturb, args.seed)
    report = estimate(
        runner,
        instance,
        perts,
        trials=args.trials,
        base_seed=args.seed,
        mode=args.mode,
        include_raw=args.raw,
        sample_policy=policy,
        jobs=args.jobs,
    )
    if args.format == "json":
        _write_bytes(report.to_json_bytes(), args.out)
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerows(report.to_csv_rows())
        _write_output(buf.getvalue(), args.out)
    return 0


def _cmd_online(args) -> int:
    g = _load_any(args.graph, False)
    if args.arrival_order == "id":
        stream = VertexArrivalStream.by_id(g)
    elif args.arrival_order == "random":
        stream = VertexArrivalStream.shuffled(g, args.seed)
    else:
        if not args.order_file:
            raise _UsageError("--order-file is required with --arrival-order file")
        order = tuple(
            int(line) for line in Path(args.order_file).read_text().split()
        )
        stream = VertexArrivalStream(g, order)
    if args.alg == "greedy":
        runner = GreedyRunner()
    else:
        runner = ApproxRunner(_approx_params(args), args.budget)
    trace = simulate(stream, runner, RandomTape(args.seed))
    _write_bytes(trace.to_json_bytes(), args.out)
    return 0


def _cmd_lb(args) -> int:
    if args.kind == "greedy":
        g, order, pert = adversarial_greedy_instance(args.n)
        from .greedy import greedy_matching
        before = greedy_matching(g, order)
        after = greedy_matching(graphs.apply_perturbation(g, pert), order)
        doc = {
            "kind": "greedy",
            "n": args.n,
            "deleted_edge": list(graphs.canon(*pert.edge)),
            "distance": graphs.hamming(before, after),
            "before_size": before.size,
            "after_size": after.size,
        }
    else:
        runner = ApproxRunner(DESK_PARAMS)
        doc = randomized_lb_experiment(args.eps, runner, args.trials, args.seed)
        doc["kind"] = "randomized"
    _write_bytes(
        (json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n").encode(),
        args.out,
    )
    return 0


def _cmd_oracle(args) -> int:
    if args.weighted:
        wg = _load_any(args.graph, True)
        value, witness = oracle.max_weight_matching(wg, args.max_n)
        header = f"# optimum_weight={value!r} size={witness.size}"
    else:
        g = _load_any(args.graph, False)
        value, witness = oracle.max_matching(g, args.max_n)
        header = f"# optimum_size={value}"
    _write_output(_matching_text(header, witness.edges), args.out)
    return 0


_COMMANDS = {
    "gen": _cmd_gen,
    "match": _cmd_match,
    "sens": _cmd_sens,
    "online": _cmd_online,
    "lb": _cmd_lb,
    "oracle": _cmd_oracle,
}


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (ParseError, NotFoundError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (BudgetExceededError, OracleGuardError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return GUARD_ERROR


if __name__ == "__main__":
    sys.exit(main())
