"""Command-line front end: run scenarios, sweep weights, plot logs.

Exit codes: 0 success, 2 validation problem, 3 infeasible scenario,
4 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import logio, plots
from .simulation import (DELTA_SWEEP_GRID, ScenarioConfig,
                         ScenarioInfeasibleError, preset_scenarios,
                         run_scenario, summarize)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_INFEASIBLE = 3
EXIT_IO = 4

METRIC_KEYS = ("steady_velocity_mean", "steady_velocity_std",
               "max_rcof_steady", "max_constraint_violation", "step_lengths")

SWEEPABLE_WEIGHTS = ("beta", "gamma", "delta")


class _CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _load_config(args) -> ScenarioConfig:
    if args.scenario is not None:
        return logio.load_scenario(args.scenario)
    presets = preset_scenarios()
    if args.preset not in presets:
        raise _CliError(f"unknown preset {args.preset!r} "
                        f"(available: {', '.join(sorted(presets))})",
                        EXIT_VALIDATION)
    return presets[args.preset]


def _run_to_dir(config: ScenarioConfig, out_dir: Path) -> dict:
    """Simulate and write the report files; figures sit beside the CSV."""
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "log.csv"
    try:
        log = run_scenario(config)
    except ScenarioInfeasibleError as err:
        if len(err.partial_log):
            logio.write_csv(err.partial_log, csv_path)
        raise
    logio.write_csv(log, csv_path)
    metrics = summarize(log)
    logio.write_metrics(metrics, out_dir / "metrics.json")
    columns = logio.read_csv(csv_path)
    for kind in plots.PLOT_KINDS:
        plots.render(kind, columns, out_dir / f"{kind}.svg", config)
    return metrics


def cmd_run(args) -> int:
    config = _load_config(args)
    out_dir = Path(args.out)
    metrics = _run_to_dir(config, out_dir)
    print(f"wrote {out_dir / 'log.csv'} ({METRIC_KEYS[0]}="
          f"{metrics['steady_velocity_mean']:.3f} m/s)")
    return EXIT_OK


def _parse_grid(text: str) -> list:
    try:
        grid = [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError:
        raise _CliError(f"grid: not a comma-separated list of numbers: {text!r}",
                        EXIT_VALIDATION)
    if not grid:
        raise _CliError("grid: empty", EXIT_VALIDATION)
    if any(v < 0 for v in grid):
        raise _CliError("grid: weights must be nonnegative", EXIT_VALIDATION)
    return grid


def cmd_sweep(args) -> int:
    config = _load_config(args)
    grid_text = args.grid if args.grid is not None else args.grid_positional
    if grid_text is None:
        if args.weight != "delta":
            raise _CliError("grid: required for beta/gamma sweeps", EXIT_VALIDATION)
        grid = list(DELTA_SWEEP_GRID)
    else:
        grid = _parse_grid(grid_text)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for value in grid:
        point = replace(config, weights=replace(config.weights,
                                                **{args.weight: value}))
        point_dir = out_dir / f"{args.weight}_{value:g}"
        entry = {"value": value, "dir": point_dir.name}
        try:
            metrics = _run_to_dir(point, point_dir)
        except ScenarioInfeasibleError as err:
            entry.update(status="infeasible", tick=err.tick)
            print(f"{args.weight}={value:g}: infeasible at tick {err.tick}",
                  file=sys.stderr)
        else:
            entry.update(status="ok",
                         steady_velocity_mean=metrics["steady_velocity_mean"],
                         max_rcof_steady=metrics["max_rcof_steady"])
        entries.append(entry)

    summary_csv = out_dir / "summary.csv"
    with summary_csv.open("w") as fh:
        fh.write(f"{args.weight},status,steady_velocity_mean,max_rcof_steady\n")
        for e in entries:
            if e["status"] == "ok":
                fh.write(f"{e['value']:g},ok,{e['steady_velocity_mean']:.6f},"
                         f"{e['max_rcof_steady']:.6f}\n")
            else:
                fh.write(f"{e['value']:g},infeasible,,\n")
    (out_dir / "summary.json").write_text(
        json.dumps({"weight": args.weight, "points": entries}, indent=2,
                   default=str) + "\n")
    plots.render_sweep_summary(entries, args.weight, out_dir / "sweep.svg")
    print(f"wrote {summary_csv} ({len(entries)} grid points)")
    return EXIT_OK


def cmd_plot(args) -> int:
    config = None
    if args.scenario is not None or args.preset is not None:
        config = _load_config(args)
    columns = logio.read_csv(args.csv)
    plots.render(args.kind, columns, args.out, config)
    print(f"wrote {args.out}")
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slipgait",
        description="Friction-aware walking pattern generation: simulate, "
                    "sweep cost weights, and plot trajectory logs.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_source(p, default_preset=None):
        p.add_argument("--preset", default=default_preset,
                       help="named built-in scenario")
        p.add_argument("--scenario", default=None, metavar="PATH",
                       help="scenario JSON file (overrides --preset)")

    p_run = sub.add_parser("run", help="simulate one scenario and write the report")
    add_source(p_run, default_preset="s1_beta")
    p_run.add_argument("--out", required=True, metavar="DIR",
                       help="output directory for log.csv, metrics.json and figures")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="rerun a scenario over a weight grid")
    p_sweep.add_argument("weight", choices=SWEEPABLE_WEIGHTS)
    p_sweep.add_argument("grid_positional", nargs="?", default=None,
                         metavar="GRID", help="comma-separated weight values")
    p_sweep.add_argument("--grid", default=None, metavar="LIST",
                         help="comma-separated weight values")
    add_source(p_sweep, default_preset="s1_delta_sweep")
    p_sweep.add_argument("--out", required=True, metavar="DIR")
    p_sweep.set_defaults(func=cmd_sweep)

    p_plot = sub.add_parser("plot", help="render one figure from a trajectory CSV")
    p_plot.add_argument("csv", metavar="CSV")
    p_plot.add_argument("--kind", required=True, choices=plots.PLOT_KINDS)
    p_plot.add_argument("--out", required=True, metavar="SVG")
    add_source(p_plot)
    p_plot.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _CliError as err:
        print(f"error: {err}", file=sys.stderr)
        return err.code
    except logio.ScenarioFileError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_VALIDATION
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_VALIDATION
    except ScenarioInfeasibleError as err:
        print(f"error: scenario infeasible at tick {err.tick} "
              f"(t = {err.time:.3f} s); partial log written", file=sys.stderr)
        return EXIT_INFEASIBLE
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
