"""Adaptive switching over a precision-threshold grid under short and long time budgets."""

from _common import experiment_args

from swarmest import SimParams
from swarmest.harness import DEFAULT_DELTA_PREC_GRID, ExperimentSpec, sweep_adaptive

if __name__ == "__main__":
    args = experiment_args(__doc__)
    spec = ExperimentSpec(
        base=SimParams(switch_mode="adaptive", record_stride=50_000),
        repetitions=args.reps,
        master_seed=args.seed,
        out_dir=args.out / "sweep_adaptive",
        delta_precs=DEFAULT_DELTA_PREC_GRID,
        t_f_values=(5000, 50_000),
        n_jobs=args.jobs,
    )
    summary = sweep_adaptive(spec)
    for p in summary.points:
        print(
            f"t_f={p.label['t_f']} delta_prec={p.label['delta_prec']:.0e}: "
            f"decision time {p.decision_time_mean:.0f}, E_A {p.e_a_mean:.5f}, E_T {p.e_t_mean:.2e}"
        )
