"""Error time series with a global switch at t=2500, noisy and noise-free sensing."""

from _common import experiment_args

from swarmest import SimParams
from swarmest.harness import ExperimentSpec, run_fixed_switch_timeseries

if __name__ == "__main__":
    args = experiment_args(__doc__)
    for sigma in (0.025, 0.0):
        spec = ExperimentSpec(
            base=SimParams().with_sigma(sigma),
            repetitions=args.reps,
            master_seed=args.seed,
            out_dir=args.out / f"timeseries_sigma{sigma}",
            record_stride=10,
            n_jobs=args.jobs,
        )
        table = run_fixed_switch_timeseries(spec)
        for t in (0, 2500, 5000):
            row = table.at(t)
            print(f"sigma={sigma} t={t}: E_T={row['e_t']:.5f} E_P={row['e_p']:.5f} E_A={row['e_a']:.5f}")
