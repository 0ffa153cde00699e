"""Command-line front end: ``detect``, ``bench`` and ``convert``.

Exit codes: 0 success, 1 unreadable input, 2 degenerate graph (no edge
weight), 3 internal invariant violation.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
import time
from typing import Sequence

import numpy as np

from . import _runtime
from .graph import CsrGraph, GraphFormatError, build_csr, load_edge_list, save_edge_list
from .louvain_compact import HashtableFailure, PickLessSchedule, SwitchDegrees, compact_louvain
from .louvain_mc import LouvainParams, LouvainResult, louvain
from .oracle import sequential_louvain
from .quality import DegenerateGraphError, modularity

EXIT_PARSE = 1
EXIT_DEGENERATE = 2
EXIT_INTERNAL = 3

PHASES = ("local_moving", "aggregation", "other")


# --- report document --------------------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ",".join(_fmt(v) for v in value)
    return str(value)


def format_report(report: dict) -> str:
    return "".join(f"{key}={_fmt(value)}\n" for key, value in report.items())


def parse_report(text: str) -> dict[str, str]:
    out = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        out[key] = value
    return out


def write_membership(path: str, membership: np.ndarray) -> None:
    with open(path, "w") as fh:
        for v, c in enumerate(membership.tolist()):
            fh.write(f"{v}\t{c}\n")


def read_membership(path: str) -> np.ndarray:
    pairs = np.loadtxt(path, dtype=np.int64, ndmin=2)
    if pairs.size == 0:
        return np.empty(0, dtype=np.uint32)
    out = np.empty(pairs.shape[0], dtype=np.uint32)
    out[pairs[:, 0]] = pairs[:, 1]
    return out


def fractions(times: dict[str, float]) -> dict[str, float]:
    total = sum(times.values())
    if total <= 0:
        return {k: 1.0 / len(times) for k in times}
    return {k: v / total for k, v in times.items()}


def graph_stats(g: CsrGraph) -> dict:
    n = g.num_vertices
    return {
        "vertices": n,
        "edges": g.num_arcs / 2,
        "arcs": g.num_arcs,
        "avg_degree": g.num_arcs / n if n else 0.0,
    }


def run_report(args, g: CsrGraph, result: LouvainResult, wall: float) -> dict:
    report = {"input": args.input, "format": args.format or "auto"}
    report.update(graph_stats(g))
    report["engine"] = args.engine
    report.update(_params_echo(args))
    report["modularity"] = modularity(g, result.membership)
    report["communities"] = result.communities
    report["passes"] = result.passes
    report["iterations_per_pass"] = result.iterations_per_pass
    for name, frac in fractions(result.phase_times).items():
        report[f"phase_split.{name}"] = frac
    total = sum(result.pass_times)
    report["pass_split"] = [t / total if total > 0 else 0.0 for t in result.pass_times]
    report["wall_time"] = wall
    report["edges_per_second"] = (g.num_arcs / 2) / wall if wall > 0 else math.inf
    return report


# --- argument handling ------------------------------------------------------


def _params_echo(args) -> dict:
    echo = {
        "params.max_passes": args.max_passes,
        "params.max_iterations": args.max_iterations,
        "params.tolerance": args.tolerance,
        "params.tolerance_drop": args.tolerance_drop,
        "params.aggregation_tolerance": args.aggregation_tolerance,
        "params.chunk_size": args.chunk_size,
    }
    if args.engine == "compact":
        echo.update({
            "params.pick_less": f"PL{args.pl_period}" if args.pl_period else "off",
            "params.switch_move": args.switch_move,
            "params.switch_aggregate": args.switch_aggregate,
            "params.probing": args.probing,
            "params.value_bits": args.value_bits,
        })
    return echo


def _params(args, threads: int) -> LouvainParams:
    return LouvainParams(
        max_passes=args.max_passes,
        max_iterations=args.max_iterations,
        initial_tolerance=args.tolerance,
        tolerance_drop=args.tolerance_drop,
        aggregation_tolerance=args.aggregation_tolerance,
        thread_count=threads,
        chunk_size=args.chunk_size,
    )


def _run_engine(args, g: CsrGraph, threads: int) -> LouvainResult:
    p = _params(args, threads)
    if args.engine == "mc":
        return louvain(g, p)
    if args.engine == "compact":
        return compact_louvain(
            g, p, PickLessSchedule(args.pl_period),
            SwitchDegrees(args.switch_move, args.switch_aggregate),
            value_bits=args.value_bits, probing=args.probing,
        )
    return sequential_louvain(g, p)


def _thread_list(text: str) -> list[int]:
    try:
        values = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad thread list {text!r}") from None
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError("thread counts must be positive")
    return values


def _add_engine_args(p: argparse.ArgumentParser, thread_list: bool) -> None:
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=["mtx", "tsv"], default=None,
                   help="input format (default: by file extension)")
    p.add_argument("--engine", choices=["mc", "compact", "sequential"], default="mc")
    default_threads = os.environ.get("LOUVAIN_THREADS", str(_runtime.default_threads()))
    if thread_list:
        p.add_argument("--threads", type=_thread_list, default=_thread_list(default_threads))
    else:
        p.add_argument("--threads", type=int, default=int(default_threads))
    p.add_argument("--max-passes", type=int, default=10)
    p.add_argument("--max-iterations", type=int, default=20)
    p.add_argument("--tolerance", type=float, default=0.01)
    p.add_argument("--tolerance-drop", type=float, default=10.0)
    p.add_argument("--aggregation-tolerance", type=float, default=0.8)
    p.add_argument("--chunk-size", type=int, default=2048)
    p.add_argument("--pl-period", type=int, default=4, help="pick-less period (0 disables)")
    p.add_argument("--switch-move", type=int, default=64)
    p.add_argument("--switch-aggregate", type=int, default=128)
    p.add_argument("--probing", default="quadratic-double",
                   choices=["linear", "quadratic", "double", "quadratic-double"])
    p.add_argument("--value-bits", type=int, choices=[32, 64], default=32)
    p.add_argument("--report", help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="parlouvain", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    detect = sub.add_parser("detect", help="cluster a graph and write its membership")
    _add_engine_args(detect, thread_list=False)
    detect.add_argument("--output", help="membership TSV (vertex<TAB>community)")

    bench = sub.add_parser("bench", help="repeat runs over a thread sweep")
    _add_engine_args(bench, thread_list=True)
    bench.add_argument("--repetitions", type=int, default=5)
    bench.add_argument("--no-warmup", action="store_true",
                       help="time the first run too (includes JIT compilation)")

    convert = sub.add_parser("convert", help="convert between MatrixMarket and TSV")
    convert.add_argument("--input", required=True)
    convert.add_argument("--format", choices=["mtx", "tsv"], default=None)
    convert.add_argument("--output", required=True)
    convert.add_argument("--output-format", choices=["mtx", "tsv"], default=None)
    convert.add_argument("--symmetrize", action="store_true",
                         help="emit both directions of every edge, merging duplicates")
    return parser


# --- commands ---------------------------------------------------------------


def _load_graph(args) -> CsrGraph:
    return build_csr(load_edge_list(args.input, args.format), symmetrize=True)


def _emit(report: dict, path: str | None) -> None:
    text = format_report(report)
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_detect(args) -> int:
    g = _load_graph(args)
    t0 = time.perf_counter()
    result = _run_engine(args, g, args.threads)
    wall = time.perf_counter() - t0
    report = run_report(args, g, result, wall)
    report["threads"] = args.threads
    if args.output:
        write_membership(args.output, result.membership)
        report["output"] = args.output
    _emit(report, args.report)
    return 0


def cmd_bench(args) -> int:
    g = _load_graph(args)
    if args.repetitions < 1:
        raise ValueError("--repetitions must be >= 1")
    if not args.no_warmup:
        _run_engine(args, g, args.threads[0])
    report = {"input": args.input, "format": args.format or "auto"}
    report.update(graph_stats(g))
    report["engine"] = args.engine
    report.update(_params_echo(args))
    report["repetitions"] = args.repetitions
    report["threads"] = args.threads
    rows = []
    for threads in args.threads:
        walls, qs, splits = [], [], []
        for r in range(args.repetitions):
            t0 = time.perf_counter()
            result = _run_engine(args, g, threads)
            wall = time.perf_counter() - t0
            q = modularity(g, result.membership)
            walls.append(wall)
            qs.append(q)
            splits.append(fractions(result.phase_times))
            report[f"run.t{threads}.r{r}.wall_time"] = wall
            report[f"run.t{threads}.r{r}.modularity"] = q
            report[f"run.t{threads}.r{r}.passes"] = result.passes
        geo = float(np.exp(np.mean(np.log(walls))))
        rows.append((threads, geo, float(np.mean(qs))))
        report[f"aggregate.t{threads}.wall_time_geomean"] = geo
        report[f"aggregate.t{threads}.modularity_mean"] = float(np.mean(qs))
        report[f"aggregate.t{threads}.modularity_std"] = float(np.std(qs))
        for name in PHASES:
            report[f"aggregate.t{threads}.phase_split.{name}"] = float(
                np.mean([s[name] for s in splits])
            )
        report[f"aggregate.t{threads}.edges_per_second"] = (g.num_arcs / 2) / geo
    base = next((w for t, w, _ in rows if t == 1), rows[0][1])
    report["scaling.columns"] = ["threads", "wall_time_geomean", "modularity_mean", "speedup"]
    for idx, (threads, geo, q) in enumerate(rows):
        report[f"aggregate.t{threads}.speedup"] = base / geo
        report[f"scaling.row.{idx}"] = [threads, geo, q, base / geo]
    _emit(report, args.report)
    return 0


def cmd_convert(args) -> int:
    el = load_edge_list(args.input, args.format)
    if args.symmetrize:
        el = build_csr(el, symmetrize=True).to_edge_list()
    save_edge_list(el, args.output, args.output_format)
    return 0


COMMANDS = {"detect": cmd_detect, "bench": cmd_bench, "convert": cmd_convert}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (GraphFormatError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DegenerateGraphError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (HashtableFailure, IndexError, AssertionError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
