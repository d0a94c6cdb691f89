"""Experiment runner: config in, simulation artifacts out.

Subcommands:
  simulate      frames + guiding fields        -> frames.ndjson, run_summary.json
  diagnose      identity report on one triple  -> diagnostics.json
  trajectories  worldline ensemble             -> trajectories.csv, frames.ndjson
  tunnel        barrier experiment             -> tunnel_report.json, trajectories.csv,
                                                  frames.ndjson
  negf          chain energy sweep             -> negf.csv
  verify        full identity suite            -> verify_report.json, nonzero exit on
                                                  any tolerance failure

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 verification tolerance failure.

An optional [trajectories] config section sets the default worldline count
and the fixed RK4 substep count; --n-traj overrides the former.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .core import (ConfigError, NumericalError, PhysicalUnits,
                   evaluate_potential, read_config_file,
                   simulation_config_from_dict)
from .diagnostics import TOLERANCE_PROFILES, build_report, run_verification
from .fields import compute_bohm_fields
from .io import export_fields, write_json, write_negf_csv, write_trajectories_csv
from .negf import negf_model_from_dict, sweep
from .propagator import propagate
from .trajectories import (integrate_trajectories, run_tunneling_experiment,
                           sample_initial_positions, uniform_frame_prefix)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_VERIFY = 4


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bohmflow",
        description="1D wave-packet simulator with a trajectory layer and identity checks")
    parser.add_argument("subcommand",
                        choices=["simulate", "diagnose", "trajectories", "tunnel",
                                 "negf", "verify"])
    parser.add_argument("--config", required=True, help="TOML configuration file")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the config seed")
    parser.add_argument("--n-traj", type=int, default=None,
                        help="trajectory count for trajectories/tunnel "
                             "(default: [trajectories] n_traj, else 1000)")
    parser.add_argument("--tolerance-profile", choices=sorted(TOLERANCE_PROFILES),
                        default="default")
    return parser


class _Run:
    """Parsed invocation: raw config dict plus resolved knobs."""

    def __init__(self, raw: dict, args):
        self.raw = raw
        self.args = args
        self.out = Path(args.out)
        traj = raw.get("trajectories", {})
        self.n_traj = args.n_traj if args.n_traj is not None else int(traj.get("n_traj", 1000))
        self.substeps = int(traj.get("substeps", 8))

    def sim_config(self):
        config = simulation_config_from_dict(self.raw, path=self.args.config)
        if self.args.seed is not None:
            config = replace(config, seed=self.args.seed)
        return config


def _fieldsets(config, frames):
    return [compute_bohm_fields(f, config.node_epsilon, config.units) for f in frames]


def _propagation_summary(result) -> dict:
    return {
        "n_frames": len(result.frames),
        "norm_drift": result.norm_drift,
        "confinement_violations": [
            {"time": t, "edge_ratio": r} for t, r in result.confinement_violations
        ],
    }


def _cmd_simulate(run: _Run) -> int:
    config = run.sim_config()
    result = propagate(config)
    export_fields(result.frames, _fieldsets(config, result.frames),
                  run.out / "frames.ndjson", config.potential)
    write_json(_propagation_summary(result), run.out / "run_summary.json")
    return EXIT_OK


def _cmd_diagnose(run: _Run) -> int:
    config = run.sim_config()
    result = propagate(config)
    frames = uniform_frame_prefix(result.frames)
    if len(frames) < 3:
        raise ConfigError("diagnose needs at least 3 uniformly spaced stored frames; "
                          "raise n_steps or lower frame_stride")
    mid = min(max(len(frames) // 2, 1), len(frames) - 2)
    potential = evaluate_potential(config.potential, config.grid, config.units)
    report = build_report(frames[mid - 1], frames[mid], frames[mid + 1], potential,
                          config.node_epsilon, config.units,
                          run.args.tolerance_profile)
    write_json(report.to_dict(), run.out / "diagnostics.json")
    return EXIT_OK


def _cmd_trajectories(run: _Run) -> int:
    config = run.sim_config()
    result = propagate(config)
    frames = uniform_frame_prefix(result.frames)
    initial = sample_initial_positions(frames[0], run.n_traj, config.seed)
    ensemble = integrate_trajectories(frames, initial, config.node_epsilon,
                                      config.units, substeps=run.substeps)
    write_trajectories_csv(ensemble, run.out / "trajectories.csv")
    export_fields(frames, _fieldsets(config, frames),
                  run.out / "frames.ndjson", config.potential)
    write_json(_propagation_summary(result), run.out / "run_summary.json")
    return EXIT_OK


def _cmd_tunnel(run: _Run) -> int:
    config = run.sim_config()
    outcome = run_tunneling_experiment(config, run.n_traj, substeps=run.substeps)
    write_json(outcome.report.to_dict(), run.out / "tunnel_report.json")
    write_trajectories_csv(outcome.ensemble, run.out / "trajectories.csv")
    frames = uniform_frame_prefix(outcome.propagation.frames)
    export_fields(frames, _fieldsets(config, frames),
                  run.out / "frames.ndjson", config.potential)
    return EXIT_OK


def _cmd_negf(run: _Run) -> int:
    if "negf" not in run.raw:
        raise ConfigError("config has no [negf] section")
    model, extras = negf_model_from_dict(run.raw["negf"])
    u = run.raw.get("units", {})
    units = PhysicalUnits(float(u.get("hbar", 1.0)), float(u.get("mass", 1.0)))
    points = sweep(model, injection_rate=extras["injection_rate"],
                   source_site=extras["source_site"], units=units)
    write_negf_csv(points, run.out / "negf.csv")
    return EXIT_OK


def _cmd_verify(run: _Run) -> int:
    config = run.sim_config()
    result = run_verification(config, run.args.tolerance_profile)
    for check in result.checks:
        status = "PASS" if check.passed else "FAIL"
        note = f"  ({check.note})" if check.note else ""
        print(f"{status}  {check.name:32s} value={check.value: .3e} "
              f"tol={check.tolerance:.3e}{note}")
    write_json({
        "profile": run.args.tolerance_profile,
        "passed": result.passed,
        "checks": [
            {"name": c.name, "value": c.value, "tolerance": c.tolerance,
             "passed": c.passed, "note": c.note}
            for c in result.checks
        ],
        "report": result.report.to_dict(),
    }, run.out / "verify_report.json")
    return EXIT_OK if result.passed else EXIT_VERIFY


_COMMANDS = {
    "simulate": _cmd_simulate,
    "diagnose": _cmd_diagnose,
    "trajectories": _cmd_trajectories,
    "tunnel": _cmd_tunnel,
    "negf": _cmd_negf,
    "verify": _cmd_verify,
}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        raw = read_config_file(args.config)
        run = _Run(raw, args)
        run.out.mkdir(parents=True, exist_ok=True)
        return _COMMANDS[args.subcommand](run)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
