"""Command-line entry point: ``viewalloc {validate,allocate,simulate,gap,gen}``.

Exit codes: 0 success, 1 bad input (parse/validation/usage), 2 infeasible
budget for a single allocation.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from .allocator import (
    ALLOCATION_ROW_COLUMNS,
    InfeasibleBudget,
    allocate,
    allocation_to_dict,
)
from .generator import GeneratorParams, instance_rng, random_budget, random_scene, random_view
from .oracle import DEFAULT_CAP, gap_csv, gap_report
from .prioritizer import PrioritizationConfig, prioritize
from .scene import ManifestError, PriorityWeights, ViewState, dump_manifest, load_manifest
from .simulator import (
    Interval,
    SessionTrace,
    TraceError,
    allocations_csv,
    dump_trace,
    intervals_csv,
    load_trace,
    report_json,
    run_session,
)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INFEASIBLE = 2


class InputError(Exception):
    pass


@dataclass
class CliConfig:
    manifest: Optional[Path] = None
    trace: Optional[Path] = None
    out_dir: Optional[Path] = None
    prioritization: PrioritizationConfig = field(default_factory=PrioritizationConfig)
    output_format: str = "json"
    oracle_cap: int = DEFAULT_CAP
    seed: int = 0

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "CliConfig":
        try:
            weights = PriorityWeights.parse(args.weights)
            prioritization = PrioritizationConfig(weights, getattr(args, "near", None))
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(str(exc)) from exc
        cfg = cls(
            manifest=getattr(args, "manifest", None),
            trace=getattr(args, "trace", None),
            out_dir=args.out_dir,
            prioritization=prioritization,
            output_format=args.format,
            oracle_cap=getattr(args, "cap", DEFAULT_CAP),
            seed=getattr(args, "seed", 0),
        )
        for path in (cfg.manifest, cfg.trace):
            if path is not None and not path.is_file():
                raise InputError(f"no such file: {path}")
        return cfg


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors, which this CLI reserves for infeasible budgets
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _vec3(text: str) -> tuple[float, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected 'x,y,z', got {text!r}")
    try:
        return tuple(float(p) for p in parts)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _pair(kind):
    def parse(text: str):
        parts = text.split(",")
        if len(parts) != 2:
            raise argparse.ArgumentTypeError(f"expected 'lo,hi', got {text!r}")
        return tuple(kind(p) for p in parts)

    return parse


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--weights", default="1,0.6,0.3", help="class weights 'c1,c2,c3' (default: %(default)s)")
    common.add_argument("--out-dir", type=Path, help="write output files here instead of stdout")
    common.add_argument("--format", choices=["json", "csv"], default="json")

    parser = _Parser(prog="viewalloc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", parents=[common], help="check a manifest")
    p.add_argument("--manifest", type=Path, required=True)

    p = sub.add_parser("allocate", parents=[common], help="allocate bitrates for one view and budget")
    p.add_argument("--manifest", type=Path, required=True)
    p.add_argument("--budget-bps", type=int, required=True)
    p.add_argument("--cam", type=_vec3, default=(0.0, 0.0, 0.0))
    p.add_argument("--fwd", type=_vec3, default=(0.0, 0.0, 1.0))
    p.add_argument("--fov-half-deg", type=float, default=45.0)
    p.add_argument("--near", type=float, required=True, help="near-distance threshold in scene units")

    p = sub.add_parser("simulate", parents=[common], help="replay a trace against a manifest")
    p.add_argument("--manifest", type=Path, required=True)
    p.add_argument("--trace", type=Path, required=True)
    p.add_argument("--near", type=float, help="override the trace's near_threshold column")

    p = sub.add_parser("gap", parents=[common], help="greedy vs exact quality on random instances")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-range", type=_pair(int), default=(2, 6))
    p.add_argument("--levels-range", type=_pair(int), default=(1, 3), help="range of L (ladder has L+1 levels)")
    p.add_argument("--bitrate-range", type=_pair(int), default=(100_000, 20_000_000))
    p.add_argument("--near", type=float, default=10.0)
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)

    p = sub.add_parser("gen", parents=[common], help="write a random manifest and trace")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int)
    p.add_argument("--levels", type=int, help="L; ladders get L+1 levels")
    p.add_argument("--intervals", type=int, default=10)
    p.add_argument("--duration-s", type=float, default=1.0)
    p.add_argument("--bitrate-range", type=_pair(int), default=(100_000, 20_000_000))
    p.add_argument("--near", type=float, default=10.0)
    p.add_argument("--infeasible-prob", type=float, default=0.0)
    return parser


def _emit(cfg: CliConfig, files: dict[str, str], stdout_key: str) -> None:
    """Write ``files`` into the output directory, or print the main one to stdout."""
    if cfg.out_dir is None:
        sys.stdout.write(files[stdout_key])
        return
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        (cfg.out_dir / name).write_text(text)


def _read_scene(cfg: CliConfig):
    return load_manifest(cfg.manifest.read_bytes())


def cmd_validate(args, cfg: CliConfig) -> int:
    scene = _read_scene(cfg)
    print(f"ok: {len(scene)} models, L={scene.ladder_level_count - 1}")
    return EXIT_OK


def cmd_allocate(args, cfg: CliConfig) -> int:
    scene = _read_scene(cfg)
    try:
        view = ViewState.looking(args.cam, args.fwd, args.fov_half_deg, args.near)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    ordered = prioritize(scene, view, cfg.prioritization)
    try:
        allocation = allocate(ordered, args.budget_bps)
    except InfeasibleBudget as exc:
        print(f"infeasible: W={exc.budget} bps < W_min={exc.w_min} bps", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ValueError as exc:
        raise InputError(str(exc)) from exc

    record = allocation_to_dict(allocation)
    if cfg.output_format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(ALLOCATION_ROW_COLUMNS)
        for row in record["rows"]:
            writer.writerow([row[c] for c in ALLOCATION_ROW_COLUMNS])
        _emit(cfg, {"allocation.csv": buf.getvalue()}, "allocation.csv")
    else:
        _emit(cfg, {"allocation.json": json.dumps(record, indent=2) + "\n"}, "allocation.json")
    return EXIT_OK


def cmd_simulate(args, cfg: CliConfig) -> int:
    scene = _read_scene(cfg)
    trace = load_trace(cfg.trace.read_text())
    report = run_session(scene, trace, cfg.prioritization)
    files = {
        "report.json": report_json(report),
        "intervals.csv": intervals_csv(report),
        "allocations.csv": allocations_csv(report),
    }
    _emit(cfg, files, "intervals.csv" if cfg.output_format == "csv" else "report.json")
    return EXIT_OK


def cmd_gap(args, cfg: CliConfig) -> int:
    if args.trials < 0:
        raise InputError("--trials must be >= 0")
    try:
        params = GeneratorParams(
            n_range=args.n_range,
            level_range=args.levels_range,
            bitrate_range=args.bitrate_range,
            near_distance_threshold=args.near,
            weights=cfg.prioritization.weights,
        )
        report = gap_report(params, args.trials, args.seed, cfg.prioritization, cap=cfg.oracle_cap)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    summary = report.summary()
    files = {"gap.csv": gap_csv(report), "gap_summary.json": json.dumps(summary, indent=2) + "\n"}
    _emit(cfg, files, "gap_summary.json" if cfg.output_format == "json" else "gap.csv")
    return EXIT_OK


def cmd_gen(args, cfg: CliConfig) -> int:
    if cfg.out_dir is None:
        raise InputError("gen requires --out-dir")
    if args.intervals < 1 or not args.duration_s > 0:
        raise InputError("--intervals must be >= 1 and --duration-s > 0")
    try:
        params = GeneratorParams(
            n_range=(args.n, args.n) if args.n is not None else (2, 6),
            level_range=(args.levels, args.levels) if args.levels is not None else (1, 3),
            bitrate_range=args.bitrate_range,
            near_distance_threshold=args.near,
            infeasible_probability=args.infeasible_prob,
        )
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    scene = random_scene(instance_rng(args.seed, 0), params)
    intervals = []
    for i in range(args.intervals):
        rng: random.Random = instance_rng(args.seed, i + 1)
        view = random_view(rng, params)
        intervals.append(Interval(args.duration_s, random_budget(rng, scene, params.infeasible_probability), view))
    files = {"manifest.json": dump_manifest(scene), "trace.csv": dump_trace(SessionTrace(tuple(intervals)))}
    _emit(cfg, files, "manifest.json")
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "allocate": cmd_allocate,
    "simulate": cmd_simulate,
    "gap": cmd_gap,
    "gen": cmd_gen,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT
    try:
        cfg = CliConfig.from_args(args)
        return COMMANDS[args.command](args, cfg)
    except ManifestError as exc:
        for err in exc.errors:
            print(f"manifest error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except (InputError, TraceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
