"""Monte-Carlo experiment drivers and their CSV/JSON outputs.

Each driver fans one master seed out to per-repetition seeds, runs the
repetitions (optionally in parallel with joblib), aggregates, and, when an
output directory is given, writes one CSV plus a JSON manifest describing
the columns, row count and parameters.
"""

from __future__ import annotations

import csv
import json
import logging
import subprocess
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .engine import RunRecord, run
from .environment import Arena, field_values
from .metrics import decision_time
from .params import SimParams, SwitchMode

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
DEFAULT_DELTA_PREC_GRID = tuple(10.0**k for k in range(-8, -2))
ARENA_SIZES = ((1.0, 1.0), (1.4, 1.4), (1.73, 1.73))


class OutputError(RuntimeError):
    pass


def default_switch_grid(t_f: int, points: int = 21) -> list[int]:
    return [int(round(v)) for v in np.linspace(0, t_f, points)]


@dataclass
class ExperimentSpec:
    base: SimParams = field(default_factory=SimParams)
    repetitions: int = 40
    master_seed: int = 0
    out_dir: Path | None = None
    record_stride: int | None = None
    switch_times: Sequence[int] | None = None
    delta_precs: Sequence[float] = DEFAULT_DELTA_PREC_GRID
    t_f_values: Sequence[int] | None = None
    arenas: Sequence[tuple[float, float]] = ARENA_SIZES
    n_jobs: int = 1

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.out_dir is not None:
            self.out_dir = Path(self.out_dir)
        for name in ("delta_precs", "arenas"):
            if len(getattr(self, name)) == 0:
                raise ValueError(f"{name} must not be empty")
        if self.switch_times is not None and len(self.switch_times) == 0:
            raise ValueError("switch_times must not be empty")

    @property
    def params(self) -> SimParams:
        if self.record_stride is None:
            return self.base
        return replace(self.base, record_stride=self.record_stride)

    def to_dict(self) -> dict:
        return {
            "base": self.base.to_dict(),
            "repetitions": self.repetitions,
            "master_seed": self.master_seed,
            "record_stride": self.record_stride,
            "switch_times": None if self.switch_times is None else list(self.switch_times),
            "delta_precs": list(self.delta_precs),
            "t_f_values": None if self.t_f_values is None else list(self.t_f_values),
            "arenas": [list(a) for a in self.arenas],
        }


def repetition_seed(master_seed: int, repetition: int) -> int:
    """Seed for repetition ``k``, derived from ``(master, k)`` alone."""
    state = np.random.SeedSequence([int(master_seed), int(repetition)]).generate_state(2, dtype=np.uint32)
    return int(state[0]) << 32 | int(state[1])


def run_repetitions(params: SimParams, repetitions: int, master_seed: int, n_jobs: int = 1) -> list[RunRecord]:
    seeds = [repetition_seed(master_seed, k) for k in range(repetitions)]
    jobs = [replace(params, seed=s) for s in seeds]
    if n_jobs == 1:
        return [run(p) for p in jobs]
    from joblib import Parallel, delayed

    return Parallel(n_jobs=n_jobs)(delayed(run)(p) for p in jobs)


@dataclass
class TimeSeriesTable:
    t: np.ndarray
    e_t: np.ndarray
    e_p: np.ndarray
    e_a: np.ndarray
    frac_switched: np.ndarray
    collective_mean: np.ndarray
    repetitions: int

    columns = ("t", "e_t", "e_p", "e_a", "frac_switched", "collective_mean")

    @classmethod
    def from_records(cls, records: Sequence[RunRecord]) -> TimeSeriesTable:
        cols = {c: np.mean([r.series(c) for r in records], axis=0) for c in cls.columns}
        cols["t"] = records[0].series("t").astype(int)
        return cls(repetitions=len(records), **cols)

    def at(self, t: int) -> dict:
        idx = np.flatnonzero(self.t == t)
        if idx.size == 0:
            raise KeyError(f"no sample recorded at t={t}")
        return {c: getattr(self, c)[idx[0]] for c in self.columns}

    def rows(self) -> list[list]:
        return [list(r) for r in zip(*(getattr(self, c) for c in self.columns))]


@dataclass
class SweepPoint:
    label: dict
    repetitions: int
    e_t_mean: float
    e_t_std: float
    e_p_mean: float
    e_p_std: float
    e_a_mean: float
    e_a_std: float
    decision_time_mean: float
    decision_time_std: float
    never_switched: int

    @classmethod
    def from_records(cls, label: dict, records: Sequence[RunRecord]) -> SweepPoint:
        finals = np.array([[r.final.e_t, r.final.e_p, r.final.e_a] for r in records])
        times = [decision_time(r) for r in records]
        means = np.array([d.mean for d in times])
        never = sum(d.never_switched for d in times)
        if never:
            log.warning("%s: %d agent(s) never switched across %d runs", label, never, len(records))
        finite = means[np.isfinite(means)]
        return cls(
            label=dict(label),
            repetitions=len(records),
            e_t_mean=float(finals[:, 0].mean()),
            e_t_std=float(finals[:, 0].std()),
            e_p_mean=float(finals[:, 1].mean()),
            e_p_std=float(finals[:, 1].std()),
            e_a_mean=float(finals[:, 2].mean()),
            e_a_std=float(finals[:, 2].std()),
            decision_time_mean=float(finite.mean()) if finite.size else float("nan"),
            decision_time_std=float(finite.std()) if finite.size else float("nan"),
            never_switched=int(never),
        )

    def standard_error(self, metric: str) -> float:
        return getattr(self, f"{metric}_std") / np.sqrt(self.repetitions)


STAT_COLUMNS = (
    "repetitions",
    "e_t_mean",
    "e_t_std",
    "e_p_mean",
    "e_p_std",
    "e_a_mean",
    "e_a_std",
    "decision_time_mean",
    "decision_time_std",
    "never_switched",
)


@dataclass
class SweepSummary:
    name: str
    points: list[SweepPoint]
    label_columns: tuple[str, ...]

    @property
    def columns(self) -> tuple[str, ...]:
        return self.label_columns + STAT_COLUMNS

    def rows(self) -> list[list]:
        return [[p.label[c] for c in self.label_columns] + [getattr(p, c) for c in STAT_COLUMNS] for p in self.points]

    def column(self, name: str) -> np.ndarray:
        if name in self.label_columns:
            return np.array([p.label[name] for p in self.points])
        return np.array([getattr(p, name) for p in self.points])

    def select(self, **label) -> SweepSummary:
        keep = [p for p in self.points if all(p.label[k] == v for k, v in label.items())]
        return SweepSummary(self.name, keep, self.label_columns)


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return str(v)


def write_csv(path: Path, columns: Sequence[str], rows: Sequence[Sequence]) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(columns)
            for row in rows:
                w.writerow([_fmt(v) for v in row])
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc
    return path


def read_csv(path: Path) -> tuple[list[str], list[list[str]]]:
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def build_version() -> str:
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty", "--tags"],
            capture_output=True,
            text=True,
            cwd=Path(__file__).resolve().parent,
            timeout=10,
        )
    except (OSError, subprocess.SubprocessError):
        return "unknown"
    return out.stdout.strip() or "unknown"


def write_manifest(out_dir: Path, experiment: str, spec: ExperimentSpec, files: dict[str, tuple[Sequence[str], int]]) -> Path:
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "experiment": experiment,
        "build": build_version(),
        "master_seed": spec.master_seed,
        "repetitions": spec.repetitions,
        "spec": spec.to_dict(),
        "files": {name: {"columns": list(cols), "rows": n} for name, (cols, n) in files.items()},
    }
    path = Path(out_dir) / f"{experiment}.manifest.json"
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc
    return path


def _emit(spec: ExperimentSpec, experiment: str, tables: dict[str, tuple[Sequence[str], list]]) -> None:
    if spec.out_dir is None:
        return
    files = {}
    for name, (cols, rows) in tables.items():
        write_csv(spec.out_dir / name, cols, rows)
        files[name] = (cols, len(rows))
    write_manifest(spec.out_dir, experiment, spec, files)


def run_fixed_switch_timeseries(spec: ExperimentSpec) -> TimeSeriesTable:
    """Repetition-averaged error time series for one parameter set."""
    params = spec.params
    if params.switch_mode is not SwitchMode.FIXED:
        raise ValueError("run_fixed_switch_timeseries needs switch_mode='fixed'")
    records = run_repetitions(params, spec.repetitions, spec.master_seed, spec.n_jobs)
    table = TimeSeriesTable.from_records(records)
    _emit(spec, "timeseries", {"timeseries.csv": (TimeSeriesTable.columns, table.rows())})
    return table


def sweep_switch_time(spec: ExperimentSpec) -> SweepSummary:
    params = replace(spec.params, switch_mode=SwitchMode.FIXED)
    grid = spec.switch_times if spec.switch_times is not None else default_switch_grid(params.t_f)
    points = []
    for t_sw in grid:
        records = run_repetitions(replace(params, t_sw=int(t_sw)), spec.repetitions, spec.master_seed, spec.n_jobs)
        points.append(SweepPoint.from_records({"t_sw": int(t_sw)}, records))
    summary = SweepSummary("sweep_switch", points, ("t_sw",))
    _emit(spec, "sweep_switch", {"sweep_switch.csv": (summary.columns, summary.rows())})
    return summary


def sweep_adaptive(spec: ExperimentSpec) -> SweepSummary:
    """Adaptive switching over a precision-threshold grid, for each time budget."""
    params = replace(spec.params, switch_mode=SwitchMode.ADAPTIVE)
    budgets = spec.t_f_values if spec.t_f_values is not None else [params.t_f]
    points = []
    for t_f in budgets:
        for delta in spec.delta_precs:
            p = replace(params, t_f=int(t_f), delta_prec=float(delta))
            records = run_repetitions(p, spec.repetitions, spec.master_seed, spec.n_jobs)
            points.append(SweepPoint.from_records({"t_f": int(t_f), "delta_prec": float(delta)}, records))
    summary = SweepSummary("sweep_adaptive", points, ("t_f", "delta_prec"))
    _emit(spec, "sweep_adaptive", {"sweep_adaptive.csv": (summary.columns, summary.rows())})
    return summary


def sweep_arena(spec: ExperimentSpec) -> tuple[SweepSummary, dict[tuple[float, float], TimeSeriesTable]]:
    """Adaptive switching across arena sizes; same patch, same seeds in every arena."""
    params = replace(spec.params, switch_mode=SwitchMode.ADAPTIVE)
    points, series = [], {}
    ts_rows = []
    for width, height in spec.arenas:
        p = replace(params, arena=Arena(float(width), float(height)))
        p.validate()
        records = run_repetitions(p, spec.repetitions, spec.master_seed, spec.n_jobs)
        points.append(SweepPoint.from_records({"width": float(width), "height": float(height)}, records))
        table = TimeSeriesTable.from_records(records)
        series[(float(width), float(height))] = table
        ts_rows.extend([float(width), float(height), *row] for row in table.rows())
    summary = SweepSummary("sweep_arena", points, ("width", "height"))
    _emit(
        spec,
        "sweep_arena",
        {
            "sweep_arena.csv": (summary.columns, summary.rows()),
            "sweep_arena_timeseries.csv": (("width", "height") + TimeSeriesTable.columns, ts_rows),
        },
    )
    return summary, series


SNAPSHOT_COLUMNS = ("agent", "x0", "y0", "xf", "yf", "g0", "gf", "z_gt")


def snapshot_rows(record: RunRecord, params: SimParams | None = None) -> list[list]:
    params = params or SimParams.from_dict(record.params)
    x0 = np.asarray(record.initial_positions)
    xf = np.asarray(record.final_positions)
    g0 = field_values(params.field, params.arena, x0)
    gf = field_values(params.field, params.arena, xf)
    return [
        [i, *x0[i], *xf[i], g0[i], gf[i], record.z_gt]
        for i in range(len(x0))
    ]


def emit_positions_snapshot(record: RunRecord, path: Path) -> Path:
    """CSV of initial and final positions (with field values and the ground truth)."""
    return write_csv(path, SNAPSHOT_COLUMNS, snapshot_rows(record))


def load_config(path: Path) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise OutputError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValueError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ValueError(f"config {path} must be a JSON object")
    return data


def spec_from_config(data: dict) -> ExperimentSpec:
    data = dict(data)
    params = SimParams.from_dict(data.pop("params", {}))
    known = {f for f in ExperimentSpec.__dataclass_fields__ if f != "base"}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown experiment field(s): {sorted(unknown)}")
    if "arenas" in data:
        data["arenas"] = [tuple(a) for a in data["arenas"]]
    return ExperimentSpec(base=params, **data)
