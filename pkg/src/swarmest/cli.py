"""Command-line entry point: ``swarmest <command> [--config FILE] [overrides]``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import harness
from .engine import run
from .params import SimParams

log = logging.getLogger("swarmest")

# Flags that map straight onto SimParams fields.
PARAM_FLAGS = {
    "n_agents": int,
    "t_f": int,
    "t_sw": int,
    "delta_prec": float,
    "delta_mem": int,
    "comm_range": float,
    "step_size": float,
    "sigma": float,
    "switch_mode": str,
    "gradient_mode": str,
}


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _ints(text: str) -> list[int]:
    return [int(float(v)) for v in text.split(",") if v.strip()]


def _arenas(text: str) -> list[tuple[float, float]]:
    out = []
    for item in text.split(","):
        w, _, h = item.strip().partition("x")
        out.append((float(w), float(h or w)))
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON experiment config")
    common.add_argument("--seed", type=int, help="master seed")
    common.add_argument("--out", type=Path, help="output directory")
    common.add_argument("--reps", type=int, help="Monte-Carlo repetitions")
    common.add_argument("--stride", type=int, help="record every N ticks")
    common.add_argument("--jobs", type=int, help="parallel workers (joblib)")
    common.add_argument("-v", "--verbose", action="store_true")
    for name, kind in PARAM_FLAGS.items():
        common.add_argument(f"--{name.replace('_', '-')}", dest=name, type=kind)

    parser = argparse.ArgumentParser(prog="swarmest", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="fixed-switch error time series")
    p = sub.add_parser("sweep-switch", parents=[common], help="final errors versus switching time")
    p.add_argument("--switch-times", type=_ints, help="comma-separated t_sw grid")
    p = sub.add_parser("sweep-adaptive", parents=[common], help="adaptive switching over a threshold grid")
    p.add_argument("--delta-precs", type=_floats, help="comma-separated precision thresholds")
    p.add_argument("--t-f-values", type=_ints, help="comma-separated time budgets")
    p = sub.add_parser("sweep-arena", parents=[common], help="adaptive switching across arena sizes")
    p.add_argument("--arenas", type=_arenas, help="e.g. 1x1,1.4x1.4,1.73x1.73")
    sub.add_parser("snapshot", parents=[common], help="initial/final positions of one run")
    return parser


def spec_from_args(args: argparse.Namespace) -> harness.ExperimentSpec:
    data = harness.load_config(args.config) if args.config else {}
    params = dict(data.pop("params", {}))
    for name in PARAM_FLAGS:
        value = getattr(args, name, None)
        if value is not None:
            params[name] = value
    overrides = {
        "master_seed": args.seed,
        "out_dir": args.out,
        "repetitions": args.reps,
        "record_stride": args.stride,
        "n_jobs": args.jobs,
        "switch_times": getattr(args, "switch_times", None),
        "delta_precs": getattr(args, "delta_precs", None),
        "t_f_values": getattr(args, "t_f_values", None),
        "arenas": getattr(args, "arenas", None),
    }
    data.update({k: v for k, v in overrides.items() if v is not None})
    data["params"] = params
    spec = harness.spec_from_config(data)
    spec.base.validate()
    return spec


def _run_command(command: str, spec: harness.ExperimentSpec) -> str:
    if command == "run":
        table = harness.run_fixed_switch_timeseries(spec)
        final = table.at(int(table.t[-1]))
        return json.dumps({k: float(v) for k, v in final.items()})
    if command == "sweep-switch":
        summary = harness.sweep_switch_time(spec)
    elif command == "sweep-adaptive":
        summary = harness.sweep_adaptive(spec)
    elif command == "sweep-arena":
        summary, _ = harness.sweep_arena(spec)
    else:
        params = replace(spec.params, seed=harness.repetition_seed(spec.master_seed, 0))
        record = run(params)
        out = (spec.out_dir or Path(".")) / "snapshot.csv"
        harness.emit_positions_snapshot(record, out)
        harness.write_manifest(
            out.parent,
            "snapshot",
            replace(spec, repetitions=1),
            {"snapshot.csv": (harness.SNAPSHOT_COLUMNS, params.n_agents)},
        )
        return str(out)
    lines = [",".join(summary.columns)]
    lines += [",".join(harness._fmt(v) for v in row) for row in summary.rows()]
    return "\n".join(lines)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        spec = spec_from_args(args)
        print(_run_command(args.command, spec))
    except (ValueError, TypeError, KeyError) as exc:
        print(f"swarmest: configuration error: {exc}", file=sys.stderr)
        return 2
    except (OSError, harness.OutputError) as exc:
        print(f"swarmest: I/O error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
