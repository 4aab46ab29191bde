"""Collective estimation of a field's mean intensity by an exploring, then aggregating, swarm."""

from .environment import Arena, FieldKind, FieldSpec, Peak, ground_truth_mean, intensity_at, reflect_step, sense
from .params import EstimateSource, GradientMode, Patch, SimParams, SwitchMode
from .engine import RunRecord, World, init_world, neighbors, run, tick
from .metrics import MetricsSample, accuracy_error, decision_time, precision_error, trueness_error

__all__ = [
    "Arena",
    "EstimateSource",
    "FieldKind",
    "FieldSpec",
    "GradientMode",
    "MetricsSample",
    "Patch",
    "Peak",
    "RunRecord",
    "SimParams",
    "SwitchMode",
    "World",
    "accuracy_error",
    "decision_time",
    "ground_truth_mean",
    "init_world",
    "intensity_at",
    "neighbors",
    "precision_error",
    "reflect_step",
    "run",
    "sense",
    "tick",
    "trueness_error",
]
