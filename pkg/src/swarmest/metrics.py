"""Trueness / precision / accuracy errors of a set of estimates, and decision speed."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class MetricsSample:
    t: int
    e_t: float
    e_p: float
    e_a: float
    frac_switched: float
    collective_mean: float


def _estimates(estimates) -> np.ndarray:
    z = np.asarray(estimates, dtype=float).ravel()
    if z.size == 0:
        raise ValueError("need at least one estimate")
    return z


def trueness_error(estimates, z_gt: float) -> float:
    """Squared bias of the collective mean."""
    z = _estimates(estimates)
    return float((z.mean() - z_gt) ** 2)


def precision_error(estimates) -> float:
    """Population variance of the estimates."""
    z = _estimates(estimates)
    return float(np.mean((z - z.mean()) ** 2))


def accuracy_error(estimates, z_gt: float) -> float:
    z = _estimates(estimates)
    return float(np.mean((z - z_gt) ** 2))


def sample_metrics(t: int, estimates, z_gt: float, frac_switched: float) -> MetricsSample:
    z = _estimates(estimates)
    return MetricsSample(
        t=int(t),
        e_t=trueness_error(z, z_gt),
        e_p=precision_error(z),
        e_a=accuracy_error(z, z_gt),
        frac_switched=float(frac_switched),
        collective_mean=float(z.mean()),
    )


@dataclass(frozen=True)
class DecisionTime:
    mean: float
    n_switched: int
    never_switched: int

    @property
    def incomplete(self) -> bool:
        return self.never_switched > 0


def decision_time(record) -> DecisionTime:
    """Mean switch time over agents that switched.

    ``record`` is a ``RunRecord`` or any sequence of switch times where
    ``None`` marks an agent that never switched.  ``mean`` is NaN when no
    agent switched.
    """
    times = getattr(record, "switch_times", record)
    switched = [t for t in times if t is not None]
    never = len(times) - len(switched)
    mean = float(np.mean(switched)) if switched else float("nan")
    return DecisionTime(mean=mean, n_switched=len(switched), never_switched=never)
