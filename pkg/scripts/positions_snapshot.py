"""Initial and final agent positions for the cone and multi-peak fields."""

from dataclasses import replace

from _common import experiment_args

from swarmest import FieldSpec, SimParams, run
from swarmest.harness import emit_positions_snapshot, repetition_seed

if __name__ == "__main__":
    args = experiment_args(__doc__, reps=1)
    for name, field in (("cone", FieldSpec.cone()), ("multipeak", FieldSpec.multipeak())):
        params = replace(SimParams(field=field), seed=repetition_seed(args.seed, 0))
        path = emit_positions_snapshot(run(params), args.out / f"snapshot_{name}.csv")
        print(f"wrote {path}")
