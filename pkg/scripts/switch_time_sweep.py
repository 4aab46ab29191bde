"""Final errors versus switching time for three arena sizes, noisy and noise-free."""

from _common import experiment_args

from swarmest import Arena, SimParams
from swarmest.harness import ARENA_SIZES, ExperimentSpec, sweep_switch_time

if __name__ == "__main__":
    args = experiment_args(__doc__)
    for width, height in ARENA_SIZES:
        for sigma in (0.025, 0.0):
            spec = ExperimentSpec(
                base=SimParams(arena=Arena(width, height), record_stride=5000).with_sigma(sigma),
                repetitions=args.reps,
                master_seed=args.seed,
                out_dir=args.out / f"sweep_switch_{width}x{height}_sigma{sigma}",
                n_jobs=args.jobs,
            )
            summary = sweep_switch_time(spec)
            best = summary.points[int(summary.column("e_a_mean").argmin())]
            print(f"arena {width}x{height} sigma={sigma}: best t_sw={best.label['t_sw']} E_A={best.e_a_mean:.5f}")
