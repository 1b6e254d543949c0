"""Batch command-line interface.

Subcommands:
    run           integrate a configured problem, write trajectory CSVs
    check-kernels certify the coefficient hypotheses, write a JSON report
    benchmark     constant-kernel analytic benchmark
    experiments   run the selected validation experiments
    convergence   truncation-level convergence study

All diagnostics go to standard error; data goes to files under the
configured output directory.  Every output file starts with a comment
line carrying the config digest.  Exit codes: 0 success, 1 invalid
configuration, 2 runtime or stability failure, 3 experiment failure.

Example:
    gcfpbe run --config problem.json --plot
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import svgplot
from .config import ConfigError, RunConfig, config_digest, parse_config
from .coefficients import verify_assumptions
from .diagnostics import MOMENT_CSV_COLUMNS
from .experiments import (Scenario, constant_kernel_benchmark, longtime_first,
                          longtime_zeroth, stability_experiment,
                          truncation_convergence)
from .integrator import StabilityError, run as run_solver

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2
EXIT_EXPERIMENT = 3

DEFAULT_BENCHMARK_CONFIG = {
    "coagulation": {"kind": "constant", "params": {"value": 1.0}},
    "grid": {"u_max": 100.0, "cells": 400, "scheme": "geometric"},
    "initial": {"kind": "exp_decay", "params": {"scale": 1.0}},
    "stepper": {"t_end": 10.0, "output_spacing": 0.25, "dt_max": 0.05},
    "output_dir": "out",
}


def _info(msg):
    print(msg, file=sys.stderr)


def _load_config(path) -> tuple[RunConfig, str]:
    text = Path(path).read_text()
    cfg = parse_config(text)
    return cfg, config_digest(text)


def _scenario(cfg: RunConfig, digest: str) -> Scenario:
    grid = cfg.build_grid()
    return Scenario(coeffs=cfg.coefficient_set(), grid=grid,
                    initial_xi=cfg.initial_xi(grid),
                    stepper=cfg.stepper_config(),
                    probes=cfg.probes.build(grid), digest=digest)


def _write_text(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    _info(f"wrote {path}")


def _csv_lines(digest, header, rows):
    lines = [f"# config_digest={digest}", ",".join(header)]
    for row in rows:
        lines.append(",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def _write_moments_csv(path: Path, traj, digest):
    rows = []
    for rec, led in zip(traj.moments, traj.ledgers):
        rows.append((rec.t, rec.m0, rec.m1, rec.m2, rec.weighted_norm,
                     led.overflow_mass, led.renewal_number, led.renewal_mass))
    _write_text(path, _csv_lines(digest, MOMENT_CSV_COLUMNS, rows))


def _write_snapshot_csv(path: Path, state, digest):
    rows = zip(state.grid.pivots, state.xi)
    _write_text(path, _csv_lines(digest, ("u_pivot", "xi"), rows))


def _write_trajectory_csv(path: Path, traj, digest):
    rows = []
    for snap in traj.snapshots:
        for u, v in zip(traj.grid.pivots, snap.xi):
            rows.append((snap.t, u, v))
    _write_text(path, _csv_lines(digest, ("t", "u_pivot", "xi"), rows))


def _cmd_run(args):
    cfg, digest = _load_config(args.config)
    out = Path(args.output_dir or cfg.output_dir)
    scenario = _scenario(cfg, digest)
    _info(f"running: {scenario.grid.n_cells} cells, t_end={cfg.stepper.t_end}, "
          f"digest={digest}")
    traj = run_solver(scenario.initial_state(), scenario.coeffs, scenario.stepper)
    _write_moments_csv(out / "moments.csv", traj, digest)
    _write_snapshot_csv(out / "snapshot_initial.csv", traj.snapshots[0], digest)
    _write_snapshot_csv(out / "snapshot_final.csv", traj.snapshots[-1], digest)
    _write_trajectory_csv(out / "trajectory.csv", traj, digest)
    if args.plot:
        times = [r.t for r in traj.moments]
        series = [("M0", times, [r.m0 for r in traj.moments]),
                  ("M1", times, [r.m1 for r in traj.moments]),
                  ("M2", times, [r.m2 for r in traj.moments])]
        svg = svgplot.line_chart(series, title="moment evolution",
                                 xlabel="t", ylabel="moment")
        _write_text(out / "moments.svg", svg)
    return EXIT_OK


def _cmd_check_kernels(args):
    cfg, digest = _load_config(args.config)
    out = Path(args.output_dir or cfg.output_dir)
    grid = cfg.build_grid()
    report = verify_assumptions(
        cfg.coefficient_set(), cfg.probes.build(grid),
        lower_bound_thetas=(1e-3, 1e-2, 1e-1, 1.0),
        power_lower_lambda=cfg.experiments.power_lambda)
    payload = json.loads(report.to_json())
    payload["_config_digest"] = digest
    _write_text(out / "assumptions.json", json.dumps(payload, indent=2) + "\n")
    bad = [k for k, c in report.checks.items() if not c.satisfied]
    _info("all hypotheses satisfied" if not bad
          else f"violated hypotheses: {', '.join(sorted(bad))}")
    return EXIT_OK


def _write_report(out: Path, report, digest):
    payload = report.to_dict()
    payload["_config_digest"] = digest
    _write_text(out / f"experiment_{report.experiment}.json",
                json.dumps(payload, indent=2) + "\n")
    status = "PASS" if report.passed else ("INCONCLUSIVE" if report.inconclusive else "FAIL")
    _info(f"{report.experiment}: {status} ({report.runtime_s:.2f}s)")
    if not report.passed and report.details.get("violated_hypothesis"):
        _info(f"  violated hypothesis: {report.details['violated_hypothesis']}")


def _cmd_benchmark(args):
    if args.config:
        cfg, digest = _load_config(args.config)
    else:
        text = json.dumps(DEFAULT_BENCHMARK_CONFIG)
        cfg, digest = parse_config(text), config_digest(text)
        _info("using the built-in benchmark configuration")
    out = Path(args.output_dir or cfg.output_dir)
    report = constant_kernel_benchmark(_scenario(cfg, digest))
    _write_report(out, report, digest)
    return EXIT_OK if report.passed else EXIT_EXPERIMENT


def _run_selected(cfg: RunConfig, digest: str, names, out: Path):
    scenario = _scenario(cfg, digest)
    opts = cfg.experiments
    reports = []
    for name in names:
        if name == "truncation_convergence":
            rep = truncation_convergence(scenario, opts.levels,
                                         tolerance=opts.truncation_tolerance,
                                         growth_floor=opts.growth_floor)
        elif name == "stability":
            rep = stability_experiment(scenario, opts.epsilons)
        elif name == "longtime_zeroth":
            rep = longtime_zeroth(scenario)
        elif name == "longtime_first":
            rep = longtime_first(scenario, opts.power_lambda)
        elif name == "constant_kernel_benchmark":
            rep = constant_kernel_benchmark(scenario)
        else:
            raise ConfigError([f"unknown experiment {name!r}"])
        reports.append(rep)
        _write_report(out, rep, digest)
    index = {r.experiment: {"pass": bool(r.passed),
                            "file": f"experiment_{r.experiment}.json"}
             for r in reports}
    index["_config_digest"] = digest
    _write_text(out / "experiments_index.json", json.dumps(index, indent=2) + "\n")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_EXPERIMENT


def _cmd_experiments(args):
    cfg, digest = _load_config(args.config)
    out = Path(args.output_dir or cfg.output_dir)
    names = args.select.split(",") if args.select else cfg.experiments.select
    if not names:
        raise ConfigError(["no experiments selected: pass --select or set experiments.select"])
    return _run_selected(cfg, digest, names, out)


def _cmd_convergence(args):
    cfg, digest = _load_config(args.config)
    out = Path(args.output_dir or cfg.output_dir)
    return _run_selected(cfg, digest, ["truncation_convergence"], out)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gcfpbe",
        description="Sectional solver and validation harness for "
                    "growth-coagulation-fragmentation population balance equations")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, needs_config=True):
        p = sub.add_parser(name)
        p.add_argument("--config", required=needs_config,
                       help="path to a JSON configuration document")
        p.add_argument("--output-dir", default=None,
                       help="override the configured output directory")
        p.set_defaults(func=func)
        return p

    p_run = add("run", _cmd_run)
    p_run.add_argument("--plot", action="store_true",
                       help="also write an SVG moment chart")
    add("check-kernels", _cmd_check_kernels)
    add("benchmark", _cmd_benchmark, needs_config=False)
    p_exp = add("experiments", _cmd_experiments)
    p_exp.add_argument("--select", default=None,
                       help="comma-separated experiment names")
    add("convergence", _cmd_convergence)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        _info(str(exc))
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        _info(f"cannot read input: {exc}")
        return EXIT_CONFIG
    except StabilityError as exc:
        _info(f"stability failure: {exc}")
        return EXIT_RUNTIME
    except (ValueError, RuntimeError, ArithmeticError) as exc:
        _info(f"runtime failure: {exc}")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
