"""Command line experiment harness.

Three subcommands share one graph-preparation pipeline (parse edge list,
weighted-cascade diffusion probabilities, chosen interaction strengths):

- `select`   runs one seed-selection algorithm and prints a JSON report.
- `evaluate` estimates a metric for a fixed seed set read from a file.
- `experiment` sweeps k values, algorithms, and repetitions, and emits CSV
  rows comparing every algorithm against the sandwich selection on the same
  instance (the `gain_ratio` column).

All randomness derives from --seed; with --threads 1 reruns are byte-identical
except for the runtime_ms fields.
"""

from __future__ import annotations

import argparse
import json
import sys
import zlib
from pathlib import Path

from . import graph as graphmod
from .errors import ActivityMaxError
from .polling import IC, LT, PollingEngine
from .rng import mix_seed
from .selector import (ALGORITHMS, DEFAULT_DELTA, DEFAULT_EPSILON,
                       DEFAULT_GAMMA, DEFAULT_MAX_SAMPLES, StoppingConfig,
                       estimate_with_stopping, interaction_ratio, select)

CSV_HEADER = ("dataset", "model", "activity_setting", "k", "algorithm",
              "activity_estimate", "gain_ratio", "ratio_bound", "samples",
              "runtime_ms", "rng_seed")

METRICS = ("activity", "lower", "upper", "influence", "interaction_ratio")

DEFAULT_TRIALS = 10_000


def _uint64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit int")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("value must be a positive integer")
    return value


def _k_list(text: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError("expected a comma-separated integer list")
    if not values or any(v < 1 for v in values):
        raise argparse.ArgumentTypeError("k values must be positive integers")
    seen: list[int] = []
    for v in values:
        if v not in seen:
            seen.append(v)
    return seen


def _algorithm_list(text: str) -> list[str]:
    if text == "all":
        return list(ALGORITHMS)
    names = [part.strip() for part in text.split(",") if part.strip() != ""]
    for name in names:
        if name not in ALGORITHMS:
            raise argparse.ArgumentTypeError(
                f"unknown algorithm {name!r}; choose from {', '.join(ALGORITHMS)}")
    return names


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--graph", required=True, metavar="PATH",
                        help="edge list file, one 'src dst' pair per line")
    direction = parser.add_mutually_exclusive_group()
    direction.add_argument("--directed", dest="orientation", action="store_const",
                           const=graphmod.DIRECTED,
                           help="treat each input line as one arc")
    direction.add_argument("--undirected", dest="orientation", action="store_const",
                           const=graphmod.UNDIRECTED,
                           help="treat each input line as two opposite arcs (default)")
    parser.set_defaults(orientation=graphmod.UNDIRECTED)
    parser.add_argument("--model", choices=(IC, LT), default=IC,
                        help="diffusion model (default %(default)s)")
    parser.add_argument("--activity", choices=(graphmod.UNIFORM, graphmod.DIFFUSION),
                        default=graphmod.UNIFORM,
                        help="interaction strength setting (default %(default)s)")
    parser.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON,
                        help="relative error target (default %(default)s)")
    parser.add_argument("--delta", type=float, default=DEFAULT_DELTA,
                        help="failure probability target (default %(default)s)")
    parser.add_argument("--gamma", type=float, default=DEFAULT_GAMMA,
                        help="relative error of comparison estimates (default %(default)s)")
    parser.add_argument("--seed", type=_uint64, default=0,
                        help="master RNG seed (default %(default)s)")
    parser.add_argument("--threads", type=_positive, default=1,
                        help="parallel sampling workers (default %(default)s)")
    parser.add_argument("--max-samples", type=_positive, default=DEFAULT_MAX_SAMPLES,
                        help="hard cap on hyperedges per estimate (default %(default)s)")
    parser.add_argument("--out", metavar="PATH", default=None,
                        help="output file (default stdout)")
    parser.add_argument("--format", choices=("json", "csv"), default=None,
                        help="output format (select/evaluate: json; experiment: csv)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="actmax",
        description="Seed selection maximizing expected interaction strength "
                    "on arcs whose both endpoints become active.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_select = sub.add_parser(
        "select", help="run one selection algorithm and report its seeds")
    _add_common(p_select)
    p_select.add_argument("--algorithm", choices=ALGORITHMS, required=True)
    p_select.add_argument("--k", type=_positive, required=True,
                          help="number of seeds")

    p_eval = sub.add_parser(
        "evaluate", help="estimate a metric for a fixed seed set")
    _add_common(p_eval)
    p_eval.add_argument("--seeds", required=True, metavar="PATH",
                        help="file of node ids (whitespace or comma separated)")
    p_eval.add_argument("--metric", choices=METRICS, required=True)
    p_eval.add_argument("--trials", type=_positive, default=DEFAULT_TRIALS,
                        help="forward simulations for interaction_ratio "
                             "(default %(default)s)")

    p_exp = sub.add_parser(
        "experiment", help="sweep k and algorithms, emit comparison rows")
    _add_common(p_exp)
    group = p_exp.add_mutually_exclusive_group(required=True)
    group.add_argument("--k", type=_positive, help="single seed count")
    group.add_argument("--k-sweep", type=_k_list, metavar="A,B,C",
                       help="comma-separated seed counts")
    p_exp.add_argument("--algorithms", type=_algorithm_list, default="all",
                       help="comma-separated algorithm names or 'all' "
                            "(must include sandwich)")
    p_exp.add_argument("--repetitions", type=_positive, default=1,
                       help="independent repetitions per (k, algorithm)")
    return parser


# -- shared plumbing ------------------------------------------------------------


def _prepare_graph(args) -> graphmod.Graph:
    g = graphmod.load_edge_list(args.graph, orientation=args.orientation)
    g = graphmod.assign_diffusion_params(g)
    return graphmod.assign_activity(g, args.activity)


def _config(args) -> StoppingConfig:
    return StoppingConfig(epsilon=args.epsilon, delta=args.delta,
                          gamma=args.gamma, max_samples=args.max_samples)


def _dataset_name(path: str) -> str:
    return Path(path).stem


def _graph_summary(g: graphmod.Graph, args) -> dict:
    summary = {
        "path": args.graph,
        "orientation": args.orientation,
        "nodes": g.n,
        "arcs": g.m,
        "total_interaction_strength": g.T,
        "total_node_weight": g.W,
    }
    if g.ingestion is not None:
        summary["ingestion"] = g.ingestion.as_dict()
    return summary


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _read_seed_file(path: str) -> list[int]:
    try:
        raw = Path(path).read_text()
    except OSError as exc:
        raise ActivityMaxError(f"cannot read seed file {path}: {exc}")
    ids: list[int] = []
    for lineno, line in enumerate(raw.splitlines(), start=1):
        body = line.split("#", 1)[0]
        for token in body.replace(",", " ").split():
            try:
                ids.append(int(token))
            except ValueError:
                raise ActivityMaxError(
                    f"{path} line {lineno}: {token!r} is not a node id")
    if not ids:
        raise ActivityMaxError(f"seed file {path} contains no node ids")
    return ids


def _to_internal(g: graphmod.Graph, original_ids) -> list[int]:
    lookup = {int(orig): i for i, orig in enumerate(g.original_ids)}
    internal = []
    for orig in original_ids:
        if orig not in lookup:
            raise ActivityMaxError(f"seed id {orig} does not appear in the graph")
        internal.append(lookup[orig])
    return sorted(set(internal))


def _row_seed(master: int, k: int, algorithm: str, rep: int) -> int:
    salt = zlib.crc32(f"{k}:{algorithm}:{rep}".encode())
    return mix_seed(master, salt)


# -- subcommands ----------------------------------------------------------------


def cmd_select(args, parser: argparse.ArgumentParser) -> int:
    if args.format == "csv":
        parser.error("select emits a JSON report; --format csv applies to experiment")
    g = _prepare_graph(args)
    report = select(g, args.model, args.algorithm, args.k, config=_config(args),
                    seed=args.seed, threads=args.threads,
                    activity_setting=args.activity)
    payload = report.as_dict()
    payload["dataset"] = _dataset_name(args.graph)
    payload["graph"] = _graph_summary(g, args)
    _emit(json.dumps(payload, indent=2) + "\n", args.out)
    return 0


def cmd_evaluate(args, parser: argparse.ArgumentParser) -> int:
    if args.format == "csv":
        parser.error("evaluate emits a JSON report; --format csv applies to experiment")
    g = _prepare_graph(args)
    original = _read_seed_file(args.seeds)
    seeds = _to_internal(g, original)
    engine = PollingEngine(g, args.model, args.seed, threads=args.threads)
    payload = {
        "metric": args.metric,
        "seeds": [int(g.original_ids[v]) for v in seeds],
        "model": args.model,
        "activity_setting": args.activity,
        "rng_seed": args.seed,
        "dataset": _dataset_name(args.graph),
    }
    if args.metric == "interaction_ratio":
        both, touched, _ = engine.forward_counts(seeds, args.trials)
        payload["value"] = both / touched if touched > 0 else 0.0
        payload["trials"] = args.trials
        payload["mean_both_endpoint_arcs"] = both / args.trials
        payload["mean_touched_arcs"] = touched / args.trials
    else:
        est = estimate_with_stopping(engine, args.metric, seeds, args.epsilon,
                                     args.delta, args.max_samples)
        payload["value"] = est.value
        payload["samples"] = est.samples
        payload["covered"] = est.covered
        payload["certified"] = est.certified
    payload["graph"] = _graph_summary(g, args)
    _emit(json.dumps(payload, indent=2) + "\n", args.out)
    return 0


def cmd_experiment(args, parser: argparse.ArgumentParser) -> int:
    algorithms = args.algorithms if isinstance(args.algorithms, list) \
        else _algorithm_list(args.algorithms)
    if "sandwich" not in algorithms:
        parser.error("experiment needs 'sandwich' in --algorithms: "
                     "gain ratios are relative to it")
    ks = [args.k] if args.k is not None else args.k_sweep
    g = _prepare_graph(args)
    dataset = _dataset_name(args.graph)
    config = _config(args)
    rows: list[dict] = []
    for k in ks:
        for rep in range(args.repetitions):
            reports = {}
            sandwich_seed = _row_seed(args.seed, k, "sandwich", rep)
            reports["sandwich"] = select(
                g, args.model, "sandwich", k, config=config, seed=sandwich_seed,
                threads=args.threads, activity_setting=args.activity)
            for name in algorithms:
                if name not in reports:
                    reports[name] = select(
                        g, args.model, name, k, config=config,
                        seed=_row_seed(args.seed, k, name, rep),
                        threads=args.threads, activity_setting=args.activity)
            base = reports["sandwich"].activity_estimate
            for name in algorithms:
                rep_obj = reports[name]
                if name == "sandwich":
                    gain = 0.0
                else:
                    gain = (rep_obj.activity_estimate - base) / base \
                        if base != 0.0 else float("nan")
                rows.append({
                    "dataset": dataset,
                    "model": args.model,
                    "activity_setting": args.activity,
                    "k": k,
                    "algorithm": name,
                    "activity_estimate": rep_obj.activity_estimate,
                    "gain_ratio": gain,
                    "ratio_bound": rep_obj.ratio_bound if name == "sandwich" else None,
                    "samples": rep_obj.samples,
                    "runtime_ms": rep_obj.runtime_ms,
                    "rng_seed": rep_obj.rng_seed,
                })
    if args.format == "json":
        _emit(json.dumps(rows, indent=2) + "\n", args.out)
    else:
        lines = [",".join(CSV_HEADER)]
        for row in rows:
            cells = []
            for col in CSV_HEADER:
                value = row[col]
                cells.append("" if value is None else
                             repr(value) if isinstance(value, float) else str(value))
            lines.append(",".join(cells))
        _emit("\n".join(lines) + "\n", args.out)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"select": cmd_select, "evaluate": cmd_evaluate,
                "experiment": cmd_experiment}
    try:
        return handlers[args.command](args, parser)
    except (ActivityMaxError, ValueError, OSError) as exc:
        print(f"actmax: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
