"""Command-line entry point: run a search, run a sweep, fit results, or
verify the engine against the dense reference.

Exit status: 0 success, 1 validation/usage failure, 2 verification failure.
Data goes to files (or stdout when no --out is given); diagnostics go to
stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from dataclasses import dataclass

from .dense import verify_equivalence
from .driver import first_peak, run_search
from .engine import GroverLoopCoin, HadamardCoin, ORACLE_MODES, OracleSpec
from .harness import (
    emit_table,
    eval_rule,
    fit_power_law,
    fit_report,
    fit_scaled_sqrt_log,
    load_sweep_spec,
    rows_to_points,
    run_sweep,
    SWEEP_FIELDS,
)
from .lattice import make_geometry, vertex_index
from .presets import PRESET_NAMES, preset_output_name, run_preset

__all__ = ["Command", "parse_args", "execute", "main"]

SERIES_FIELDS = ["t", "p"]


@dataclass(frozen=True)
class Command:
    kind: str
    params: argparse.Namespace


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures mapped to exit status 1."""

    def error(self, message: str) -> None:  # noqa: D102 - argparse hook
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="lackwalk", description=__doc__)
    sub = parser.add_subparsers(dest="kind", required=True)

    def lattice_flags(p: _Parser) -> None:
        p.add_argument("--dim", type=int, required=True, help="lattice dimension (>= 1)")
        p.add_argument("--side", type=int, required=True, help="vertices per axis (>= 2)")
        p.add_argument("--targets", nargs="*", default=[], metavar="T",
                       help="marked vertices: flat indices or x,y coordinate pairs")
        p.add_argument("--oracle-mode", choices=ORACLE_MODES, default="per_target_flip")

    def coin_flags(p: _Parser) -> None:
        p.add_argument("--coin", choices=["grover", "hadamard"], default="grover")
        loop = p.add_mutually_exclusive_group()
        loop.add_argument("--self-loop", type=float, default=None,
                          help="absolute self-loop weight (grover coin)")
        loop.add_argument("--self-loop-rule", default=None, metavar="EXPR",
                          help="self-loop weight rule in N, e.g. 2/N (grover coin)")
        p.add_argument("--bias", type=float, default=0.5,
                       help="Hadamard coin bias in [0, 1]")
        p.add_argument("--target-bias", type=float, default=None,
                       help="Hadamard bias at marked vertices")
        p.add_argument("--biased", action="store_true",
                       help="use the real biased Hadamard variant instead of the symmetric one")

    run = sub.add_parser("run", help="run one search and record the probability series")
    lattice_flags(run)
    coin_flags(run)
    run.add_argument("--steps", type=int, required=True, help="number of walk steps (>= 1)")
    run.add_argument("--out", default=None, help="series CSV path (default: stdout)")

    sweep = sub.add_parser("sweep", help="run a named preset or a sweep-spec file")
    group = sweep.add_mutually_exclusive_group(required=True)
    group.add_argument("--preset", choices=PRESET_NAMES)
    group.add_argument("--spec", help="flat JSON sweep spec")
    sweep.add_argument("--out", default=None, help="output path (default: spec/preset name)")
    sweep.add_argument("--format", choices=["csv", "json"], default="csv")
    sweep.add_argument("--jobs", type=int,
                       default=int(os.environ.get("LACKWALK_JOBS", "1")),
                       help="worker processes (default: $LACKWALK_JOBS or 1)")

    fit = sub.add_parser("fit", help="fit a running-time model to a sweep CSV")
    fit.add_argument("--model", choices=["power-law", "sqrt-log"], required=True)
    fit.add_argument("--input", required=True, help="sweep CSV to fit")
    fit.add_argument("--m", type=int, default=None,
                     help="target count for the sqrt-log model (default: CSV M column)")
    fit.add_argument("--use-threshold", action="store_true",
                     help="fit threshold-crossing times instead of first-peak times")
    fit.add_argument("--min-side", type=int, default=0, help="drop rows below this side")
    fit.add_argument("--out", default=None, help="fit report JSON path (default: stdout)")

    verify = sub.add_parser("verify", help="check the engine against the dense operator")
    lattice_flags(verify)
    verify.add_argument("--self-loop", type=float, default=0.0, help="self-loop weight")
    verify.add_argument("--steps", type=int, required=True)
    verify.add_argument("--tol", type=float, required=True)
    return parser


def _parse_targets(parser: _Parser, geometry, raw: list[str]) -> tuple[int, ...]:
    targets = []
    for item in raw:
        try:
            if "," in item:
                coords = tuple(int(c) for c in item.split(","))
                targets.append(vertex_index(geometry, coords))
            else:
                index = int(item)
                if not 0 <= index < geometry.n_vertices:
                    raise ValueError(f"index {index} out of range [0, {geometry.n_vertices})")
                targets.append(index)
        except ValueError as exc:
            parser.error(f"argument --targets: {item!r}: {exc}")
    return tuple(targets)


def parse_args(argv: list[str]) -> Command:
    """Validate argv into a Command; exits with status 1 on bad usage."""
    parser = _build_parser()
    args = parser.parse_args(argv)

    if args.kind in ("run", "verify"):
        if args.dim < 1:
            parser.error("argument --dim: must be >= 1")
        if args.side < 2:
            parser.error("argument --side: must be >= 2")
        if args.steps < 1:
            parser.error("argument --steps: must be >= 1")
        geometry = make_geometry(args.dim, args.side)
        args.target_indices = _parse_targets(parser, geometry, args.targets)
    if args.kind == "run":
        if args.self_loop is not None and args.self_loop < 0:
            parser.error("argument --self-loop: must be >= 0")
        if args.coin == "hadamard" and args.dim != 1:
            parser.error("argument --coin: hadamard requires --dim 1")
        for name in ("bias", "target_bias"):
            value = getattr(args, name)
            if value is not None and not 0.0 <= value <= 1.0:
                parser.error(f"argument --{name.replace('_', '-')}: must lie in [0, 1]")
    if args.kind == "verify":
        if args.self_loop < 0:
            parser.error("argument --self-loop: must be >= 0")
        if args.tol < 0:
            parser.error("argument --tol: must be >= 0")
    if args.kind == "sweep" and args.jobs < 1:
        parser.error("argument --jobs: must be >= 1")
    if args.kind == "fit" and args.m is not None and args.m < 1:
        parser.error("argument --m: must be >= 1")
    return Command(kind=args.kind, params=args)


def _resolve_coin(args: argparse.Namespace, n_vertices: int):
    if args.coin == "hadamard":
        return HadamardCoin(bias=args.bias, symmetric=not args.biased,
                            target_bias=args.target_bias)
    if args.self_loop is not None:
        weight = args.self_loop
    elif args.self_loop_rule is not None:
        weight = eval_rule(args.self_loop_rule, n_vertices)
    else:
        weight = 0.0
    return GroverLoopCoin(loop_weight=weight)


def _write_rows(fieldnames, rows, fmt: str, out: str | None) -> None:
    if out is not None:
        emit_table(rows, fieldnames, fmt, out)
        return
    if fmt == "json":
        json.dump([{k: row.get(k) for k in fieldnames} for row in rows],
                  sys.stdout, indent=2)
        sys.stdout.write("\n")
    else:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(fieldnames)
        for row in rows:
            writer.writerow(["" if row.get(k) is None else row.get(k) for k in fieldnames])


def _execute_run(args: argparse.Namespace) -> int:
    geometry = make_geometry(args.dim, args.side)
    coin = _resolve_coin(args, geometry.n_vertices)
    oracle = OracleSpec(targets=args.target_indices, mode=args.oracle_mode)
    series = run_search(geometry, coin, oracle, args.steps)
    rows = [{"t": t, "p": float(p)} for t, p in enumerate(series.probabilities)]
    _write_rows(SERIES_FIELDS, rows, "csv", args.out)
    peak = first_peak(series)
    if peak.found:
        print(f"first peak: p={peak.p_peak:.6g} at t={peak.t_peak}", file=sys.stderr)
    else:
        print("first peak: none found", file=sys.stderr)
    return 0


def _execute_sweep(args: argparse.Namespace) -> int:
    if args.preset is not None:
        fieldnames, rows = run_preset(args.preset, jobs=args.jobs)
        out = args.out or preset_output_name(args.preset)
    else:
        spec = load_sweep_spec(args.spec)
        fieldnames, rows = SWEEP_FIELDS, run_sweep(spec, jobs=args.jobs)
        out = args.out or spec.output
    if out is None:
        _write_rows(fieldnames, rows, args.format, None)
    else:
        emit_table(rows, fieldnames, args.format, out)
        print(f"wrote {len(rows)} rows to {out}", file=sys.stderr)
    return 0


def _execute_fit(args: argparse.Namespace) -> int:
    with open(args.input, encoding="utf-8", newline="") as handle:
        raw = list(csv.DictReader(handle))
    rows = []
    try:
        for entry in raw:
            rows.append({
                "side": int(entry["side"]),
                "N": float(entry["N"]),
                "M": int(entry["M"]),
                "t_peak": float(entry["t_peak"]) if entry.get("t_peak") else None,
                "t_threshold": float(entry["t_threshold"]) if entry.get("t_threshold") else None,
            })
    except KeyError as exc:
        raise ValueError(f"{args.input}: missing sweep column {exc}") from None
    points = rows_to_points(rows, use_threshold=args.use_threshold, min_side=args.min_side)
    if not points:
        print("fit: no usable rows after filtering", file=sys.stderr)
        return 1
    m = args.m if args.m is not None else rows[0]["M"]
    if args.model == "power-law":
        fit = fit_power_law(points)
    else:
        fit = fit_scaled_sqrt_log(points, m)
    window = (min(n for n, _ in points), max(n for n, _ in points))
    report = fit_report(fit, m=m, fit_window=window)
    text = json.dumps(report, indent=2) + "\n"
    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text)
    return 0


def _execute_verify(args: argparse.Namespace) -> int:
    geometry = make_geometry(args.dim, args.side)
    coin = GroverLoopCoin(loop_weight=args.self_loop)
    oracle = OracleSpec(targets=args.target_indices, mode=args.oracle_mode)
    report = verify_equivalence(geometry, coin, oracle, args.steps, args.tol)
    verdict = "pass" if report.passed else "FAIL"
    print(f"{verdict}: max deviation {report.max_deviation:.3e} over "
          f"{report.steps} steps (tol {report.tol:.3e})")
    return 0 if report.passed else 2


def execute(command: Command) -> int:
    """Run a parsed command; returns the process exit status."""
    handlers = {
        "run": _execute_run,
        "sweep": _execute_sweep,
        "fit": _execute_fit,
        "verify": _execute_verify,
    }
    try:
        return handlers[command.kind](command.params)
    except (OSError, ValueError) as exc:
        print(f"lackwalk {command.kind}: {exc}", file=sys.stderr)
        return 1


def main(argv: list[str] | None = None) -> None:
    logging.basicConfig(stream=sys.stderr, level=logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if argv is None:
        argv = sys.argv[1:]
    sys.exit(execute(parse_args(argv)))
