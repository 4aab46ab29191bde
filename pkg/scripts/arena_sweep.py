"""Adaptive switching (delta_prec=1e-6) in three arena sizes: time series and decision times."""

from _common import experiment_args

from swarmest import SimParams
from swarmest.harness import ExperimentSpec, sweep_arena

if __name__ == "__main__":
    args = experiment_args(__doc__)
    spec = ExperimentSpec(
        base=SimParams(switch_mode="adaptive", delta_prec=1e-6),
        repetitions=args.reps,
        master_seed=args.seed,
        out_dir=args.out / "sweep_arena",
        record_stride=10,
        n_jobs=args.jobs,
    )
    summary, _ = sweep_arena(spec)
    for p in summary.points:
        print(f"{p.label['width']}x{p.label['height']}: decision time {p.decision_time_mean:.1f}, E_A {p.e_a_mean:.5f}")
