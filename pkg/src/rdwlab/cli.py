"""``rdw-lab`` command line.

    rdw-lab run --experiment 2 --controllers vis-poly,arc --trials 100 --seed 42 --out results/
    rdw-lab validate --env-pair my.env
    rdw-lab export-paths --experiment 1 --trials 10 --seed 7 --out paths/
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .controllers import CONTROLLERS
from .env import BUILTIN_IDS, EnvError, EnvPair, builtin_pair, load_environment_file
from .geom import GeometryError
from .locomotion import SamplingExhausted
from .redirect import NoSafeHeading
from .sim import (
    SimConfig,
    StartPoseInvalid,
    export_trials,
    import_trials,
    make_trials,
    run_experiment,
    trace_svg,
)

DEFAULT_CONTROLLERS = "vis-poly,arc,apf,s2c"
CSV_HEADER = ["experiment", "controller", "trial", "seed", "resets", "virt_distance_m",
              "resets_per_meter"]
_RUNTIME_ERRORS = (EnvError, GeometryError, SamplingExhausted, StartPoseInvalid, NoSafeHeading,
                   OSError, ValueError)


def _positive_int(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {n}")
    return n


def _controller_list(text: str) -> list[str]:
    names = [c.strip() for c in text.split(",") if c.strip()]
    unknown = [c for c in names if c not in CONTROLLERS]
    if not names or unknown:
        raise argparse.ArgumentTypeError(
            f"unknown controller(s) {unknown or text!r}; choose from {', '.join(CONTROLLERS)}")
    if len(set(names)) != len(names):
        raise argparse.ArgumentTypeError("controllers listed more than once")
    return names


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rdw-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_source(p, required=True):
        g = p.add_mutually_exclusive_group(required=required)
        g.add_argument("--experiment", type=int, choices=BUILTIN_IDS,
                       help="built-in environment pair")
        g.add_argument("--env-pair", type=Path, metavar="FILE", help="environment pair file")

    run = sub.add_parser("run", help="simulate controllers on shared paths")
    add_source(run)
    run.add_argument("--controllers", type=_controller_list, default=DEFAULT_CONTROLLERS,
                     help=f"comma-separated list (default {DEFAULT_CONTROLLERS})")
    run.add_argument("--trials", type=_positive_int, default=100)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--out", type=Path, default=Path("results"))
    run.add_argument("--trace-svg", action="store_true", help="write one SVG per trial")
    run.add_argument("--workers", type=_positive_int, default=None,
                     help="worker processes (default: all available cores)")
    run.add_argument("--paths", type=Path, metavar="DIR",
                     help="replay exported path files instead of generating paths")

    val = sub.add_parser("validate", help="check an environment pair")
    add_source(val)

    exp = sub.add_parser("export-paths", help="write generated paths to files")
    add_source(exp)
    exp.add_argument("--trials", type=_positive_int, default=100)
    exp.add_argument("--seed", type=int, default=0)
    exp.add_argument("--out", type=Path, default=Path("paths"))
    return parser


def _load_pair(args) -> tuple[str, EnvPair]:
    if args.experiment is not None:
        return str(args.experiment), builtin_pair(args.experiment)
    pair = load_environment_file(args.env_pair)
    return pair.name, pair


def results_csv(label: str, results) -> str:
    """CSV body (header plus one row per result), without the timestamp line."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in results:
        w.writerow([label, r.controller, r.trial, r.seed, r.resets, repr(r.virt_distance),
                    repr(r.resets_per_meter)])
    return buf.getvalue()


def summary_text(label: str, results) -> str:
    lines = [f"experiment {label}", ""]
    by: dict[str, list] = {}
    for r in results:
        by.setdefault(r.controller, []).append(r)
    head = f"{'controller':<18} {'n':>4} {'metric':<17} {'median':>10} {'mean':>10} {'IQR':>10}"
    lines += [head, "-" * len(head)]
    for c, rs in by.items():
        for metric, vals in (("resets", [r.resets for r in rs]),
                             ("resets_per_meter", [r.resets_per_meter for r in rs])):
            v = np.asarray(vals, dtype=float)
            q1, med, q3 = np.percentile(v, [25, 50, 75])
            lines.append(f"{c:<18} {len(v):>4} {metric:<17} {med:>10.4f} {v.mean():>10.4f} "
                         f"{q3 - q1:>10.4f}")
    return "\n".join(lines) + "\n"


def _cmd_run(args) -> int:
    label, pair = _load_pair(args)
    trials = import_trials(args.paths) if args.paths else make_trials(pair, args.trials, args.seed)
    cfg = SimConfig(record_trace=args.trace_svg)
    results = run_experiment(pair, args.controllers, seed=args.seed, cfg=cfg,
                             workers=args.workers, trials=trials)
    out: Path = args.out
    out.mkdir(parents=True, exist_ok=True)
    stamp = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    (out / "results.csv").write_text(f"# rdw-lab {__version__} run at {stamp}\n"
                                     + results_csv(label, results), encoding="utf-8")
    (out / "summary.txt").write_text(summary_text(label, results), encoding="utf-8")
    if args.trace_svg:
        tdir = out / "traces"
        tdir.mkdir(exist_ok=True)
        for r in results:
            (tdir / f"{r.controller}_trial{r.trial:03d}.svg").write_text(
                trace_svg(pair, r.trace), encoding="utf-8")
    print(f"{len(results)} trials -> {out / 'results.csv'}")
    return 0


def _cmd_validate(args) -> int:
    label, pair = _load_pair(args)
    for side, env in (("physical", pair.phys), ("virtual", pair.virt)):
        print(f"{side}: boundary {len(env.boundary)} vertices, "
              f"{len(env.static_obstacles)} static obstacles, "
              f"{len(env.dynamic_obstacles)} dynamic obstacles")
    print(f"{label}: ok")
    return 0


def _cmd_export(args) -> int:
    _, pair = _load_pair(args)
    files = export_trials(make_trials(pair, args.trials, args.seed), args.out)
    print(f"{len(files)} path files -> {args.out}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # usage errors exit 2, --help and --version exit 0
        return int(exc.code or 0)
    handler = {"run": _cmd_run, "validate": _cmd_validate, "export-paths": _cmd_export}
    try:
        return handler[args.command](args)
    except _RUNTIME_ERRORS as exc:
        print(f"rdw-lab: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
