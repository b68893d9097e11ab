"""Command-line entry point: ``stockblend generate | solve | experiment``.

Exit codes: 0 on success, 2 on usage errors, 1 on runtime failures.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .baseline import random_search_baseline
from .de import DEConfig, solve_one_month
from .instances import (
    INSTANCE_SUFFIX,
    InstanceError,
    generate_instance,
    load_instance,
    load_solution,
    save_instance,
    save_solution,
    shape_label,
)
from .longterm import solve_long_term
from .model import Solution
from .report import build_report, summarize

log = logging.getLogger("stockblend")

CSV_HEADER = ["Index", "Shape", "Baseline", "Max", "Min", "Mean", "Std"]


class RunFailure(RuntimeError):
    pass


def _int_list(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError(f"expected integers >= 1, got {text!r}")
    return values


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {value}")
    return value


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", choices=("lex", "bi", "longterm"), default="lex")
    p.add_argument("--np", dest="pop_size", type=int, default=10, help="population size (>= 4)")
    p.add_argument("--f", dest="scale", type=float, default=1.2, help="mutation scale F")
    p.add_argument("--cr", dest="crossover", type=float, default=0.5, help="crossover rate CR")
    p.add_argument(
        "--evals", type=_positive_int, default=100_000,
        help="evaluation budget (per month in longterm mode)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stockblend", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a seeded synthetic instance")
    g.add_argument("--months", type=_positive_int, default=1)
    g.add_argument("--parcels", type=_int_list, default=[2], help="parcels per month, e.g. 2 or 2,3")
    g.add_argument(
        "--stockpiles", type=_int_list, default=[6, 7],
        help="stockpiles available to each parcel, e.g. 6,7",
    )
    g.add_argument("--seed", type=int, default=1)
    g.add_argument("--dominant-grade", type=float, default=None, help="force stockpile 0's Cu grade")
    g.add_argument("--name", default=None)
    g.add_argument("--out", required=True, type=Path)

    s = sub.add_parser("solve", help="optimize one instance")
    s.add_argument("--instance", required=True, type=Path)
    _add_solver_flags(s)
    s.add_argument("--seed", type=int, default=1)
    s.add_argument("--warm-start", type=Path, default=None, help="solution file seeding the population")
    s.add_argument("--out", required=True, type=Path, help="solution file to write")
    s.add_argument("--report", type=Path, default=None, help="report file (default: <out>.report.json)")

    e = sub.add_parser("experiment", help="repeated runs over a directory of instances")
    e.add_argument("--instances", required=True, type=Path)
    e.add_argument("--runs", type=_positive_int, default=30)
    _add_solver_flags(e)
    e.add_argument("--baseline", action="store_true", help="also run random search with the same budget")
    e.add_argument(
        "--jobs", type=_positive_int, default=None,
        help="parallel worker processes (default: $STOCKBLEND_JOBS or 1)",
    )
    e.add_argument("--out", required=True, type=Path, help="CSV file to write")
    return parser


def _config(args, seed: int) -> DEConfig:
    mode = "bi" if args.mode == "longterm" else args.mode
    return DEConfig(args.pop_size, args.scale, args.crossover, args.evals, seed, mode)


def run_solver(instance, mode: str, config: DEConfig, warm_start: Solution | None = None):
    """Solve with the chosen mode; returns (solution, report)."""
    started = time.perf_counter()
    if mode == "longterm":
        result = solve_long_term(instance, config, warm_start=warm_start)
        return result.solution, result.report
    if instance.months != 1:
        raise ValueError(f"mode {mode!r} needs a one-month instance; use --mode longterm")
    result = solve_one_month(instance, config, warm_start=warm_start)
    report = build_report(
        instance, result.best.decoded, result.evaluations, wall_time_s=time.perf_counter() - started
    )
    return result.best.decoded, report


def cmd_generate(args) -> int:
    parcels = args.parcels[0] if len(args.parcels) == 1 else args.parcels
    stockpiles = args.stockpiles[0] if len(args.stockpiles) == 1 else args.stockpiles
    instance = generate_instance(
        args.months, parcels, stockpiles, args.seed,
        dominant_grade=args.dominant_grade, name=args.name,
    )
    save_instance(instance, args.out)
    log.info("wrote %s (%s)", args.out, shape_label(instance))
    return 0


def cmd_solve(args) -> int:
    instance = load_instance(args.instance)
    warm = load_solution(args.warm_start, instance) if args.warm_start else None
    config = _config(args, args.seed)
    solution, report = run_solver(instance, args.mode, config, warm)
    save_solution(solution, instance, args.out)
    report_path = args.report or args.out.with_name(args.out.name + ".report.json")
    doc = {"instance": instance.name, "mode": args.mode, "config": vars(config), **report.to_dict()}
    report_path.write_text(json.dumps(doc, indent=2) + "\n")
    print(
        f"copper={report.copper:.4f} feasible={report.feasible} "
        f"evaluations={report.evaluations} cu_spread={report.cu_spread:.6f}"
    )
    return 0


def _experiment_task(task):
    path, mode, config, baseline = task
    try:
        instance = load_instance(path)
        _, report = run_solver(instance, mode, config)
        base = None
        if baseline:
            budget = config.max_evals * (instance.months if mode == "longterm" else 1)
            base = random_search_baseline(instance, budget, config.seed).fitness.copper
        return report.copper, base
    except Exception as exc:
        raise RunFailure(f"{path.name}: run with seed {config.seed} failed: {exc}") from exc


def experiment_rows(paths, args) -> list[list]:
    tasks = [
        (path, args.mode, _config(args, seed), args.baseline)
        for path in paths
        for seed in range(1, args.runs + 1)
    ]
    jobs = args.jobs or _positive_int(os.environ.get("STOCKBLEND_JOBS", "1"))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_experiment_task, tasks))
    else:
        results = [_experiment_task(t) for t in tasks]

    rows = []
    for i, path in enumerate(paths):
        chunk = results[i * args.runs : (i + 1) * args.runs]
        stats = summarize(c for c, _ in chunk)
        base = summarize(b for _, b in chunk).mean if args.baseline else ""
        rows.append(
            [i + 1, shape_label(load_instance(path)), base, stats.max, stats.min, stats.mean, stats.std]
        )
    return rows


def format_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def cmd_experiment(args) -> int:
    if not args.instances.is_dir():
        raise RunFailure(f"{args.instances}: not a directory")
    paths = sorted(args.instances.glob(f"*{INSTANCE_SUFFIX}"))
    if not paths:
        raise RunFailure(f"{args.instances}: no *{INSTANCE_SUFFIX} files")
    text = format_csv(experiment_rows(paths, args))
    args.out.write_text(text)
    sys.stdout.write(text)
    return 0


COMMANDS = {"generate": cmd_generate, "solve": cmd_solve, "experiment": cmd_experiment}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if args.command in ("solve", "experiment"):
        try:
            _config(args, 1)
        except ValueError as exc:
            parser.error(str(exc))
    try:
        return COMMANDS[args.command](args)
    except (InstanceError, OSError, RunFailure, ValueError, argparse.ArgumentTypeError) as exc:
        print(f"stockblend: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
