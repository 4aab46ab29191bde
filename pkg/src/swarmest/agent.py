"""Per-agent update rules.

The rule kernels (``advance_trackers``, ``finite_difference``, ``descent_step``
and the small arithmetic helpers) broadcast over numpy arrays so the engine
can apply them to the whole swarm at once.  The ``AgentState`` functions
below them compose the same kernels for a single agent.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

import numpy as np

from .environment import Arena, fold_into
from .params import SimParams, SwitchMode

DISPLACEMENT_EPS = 1e-9
GRADIENT_EPS = 1e-12


class Phase(enum.IntEnum):
    EXPLORING = 0
    EXPLOITING = 1


def wrap_angle(a):
    """Wrap angles into (-pi, pi]."""
    return a - 2.0 * np.pi * np.ceil((a - np.pi) / (2.0 * np.pi))


def explore_heading(heading, r_psi: float, rng: np.random.Generator):
    zeta = rng.uniform(-np.pi, np.pi, size=np.shape(heading))
    return wrap_angle(heading + r_psi * zeta)


def mirror_heading(heading, flipped):
    """Specular heading update for walls crossed along the flagged axes."""
    flipped = np.asarray(flipped)
    c, s = np.cos(heading), np.sin(heading)
    c = np.where(flipped[..., 0], -c, c)
    s = np.where(flipped[..., 1], -s, s)
    return np.arctan2(s, c)


def advance_trackers(min_seen, max_seen, lag, counter, z, beta_lag: float, delta_prec: float):
    """One step of the exploration-quality trackers.

    ``min_seen`` is NaN for agents that have not sampled yet; their lag is
    seeded with the first midpoint.  Returns
    ``(min_seen, max_seen, lag, counter, z_avg, z_ref)``.
    """
    first = np.isnan(min_seen)
    lo = np.fmin(min_seen, z)
    hi = np.fmax(max_seen, z)
    z_avg = 0.5 * (lo + hi)
    lag_now = np.where(first, z_avg, lag)
    z_ref = np.abs(lag_now - z_avg)
    new_lag = beta_lag * lag_now + (1.0 - beta_lag) * z_avg
    new_counter = np.where(z_ref < delta_prec, counter + 1, np.maximum(counter - 1, 0))
    return lo, hi, new_lag, new_counter, z_avg, z_ref


def switch_due(counter, t: int, params: SimParams):
    if params.switch_mode is SwitchMode.FIXED:
        return np.full(np.shape(counter), t >= params.t_sw, dtype=bool)
    return np.asarray(counter) > params.delta_mem


def collective_signal(z_s: float, neighbor_memories) -> float:
    m = np.asarray(neighbor_memories, dtype=float)
    return (z_s + m.sum()) / (1 + m.size)


def memory_update(z_m, z_col, alpha: float):
    return alpha * z_m + (1.0 - alpha) * z_col


def objective(z_s, z_col):
    return 0.5 * (z_s - z_col) ** 2


def finite_difference(delta, displacement, eps: float = DISPLACEMENT_EPS):
    """Per-axis slope ``delta / displacement``; tiny displacements contribute 0."""
    delta = np.asarray(delta, dtype=float)[..., None]
    dx = np.asarray(displacement, dtype=float)
    ok = np.abs(dx) >= eps
    return np.where(ok, delta / np.where(ok, dx, 1.0), 0.0)


def decay(previous, sample, beta: float):
    return beta * previous + (1.0 - beta) * sample


def descent_step(gradient, step_size: float, r_lambda: float, eta):
    """Normalised descent direction plus weighted uniform noise, scaled by the step size.

    A gradient with norm below ``GRADIENT_EPS`` leaves only the random part.
    """
    g = np.asarray(gradient, dtype=float)
    norm = np.linalg.norm(g, axis=-1, keepdims=True)
    unit = np.where(norm >= GRADIENT_EPS, g / np.where(norm > 0, norm, 1.0), 0.0)
    return step_size * (-(1.0 - r_lambda) * unit + r_lambda * np.asarray(eta))


@dataclass(frozen=True)
class AgentState:
    position: np.ndarray
    heading: float
    phase: Phase = Phase.EXPLORING
    memory: float = float("nan")
    last_position: np.ndarray | None = None
    grad_memory: np.ndarray = field(default_factory=lambda: np.zeros(2))
    intensity_gradient: np.ndarray = field(default_factory=lambda: np.zeros(2))
    min_seen: float = float("nan")
    max_seen: float = float("nan")
    lag: float = float("nan")
    counter: int = 0
    switch_time: int | None = None
    last_sensed: float = float("nan")
    last_objective: float | None = None

    @property
    def z_avg(self) -> float:
        return 0.5 * (self.min_seen + self.max_seen)

    @property
    def displacement(self) -> np.ndarray:
        if self.last_position is None:
            return np.zeros(2)
        return self.position - self.last_position


def explore_move(state: AgentState, params: SimParams, rng: np.random.Generator, arena: Arena | None = None) -> AgentState:
    if state.phase is not Phase.EXPLORING:
        raise ValueError("explore_move requires an exploring agent")
    arena = arena or params.arena
    heading = float(explore_heading(state.heading, params.r_psi, rng))
    target = state.position + params.step_size * np.array([np.cos(heading), np.sin(heading)])
    position, flipped = fold_into(arena, target)
    if flipped.any():
        heading = float(mirror_heading(heading, flipped))
    return replace(state, position=position, heading=heading, last_position=state.position)


def update_switch_trackers(state: AgentState, z_s: float, params: SimParams) -> AgentState:
    lo, hi, lag, counter, _, _ = advance_trackers(
        state.min_seen, state.max_seen, state.lag, state.counter, z_s, params.beta_lag, params.delta_prec
    )
    return replace(state, min_seen=float(lo), max_seen=float(hi), lag=float(lag), counter=int(counter))


def should_switch(state: AgentState, params: SimParams, t: int) -> bool:
    if state.phase is not Phase.EXPLORING:
        raise ValueError("should_switch is only defined while exploring")
    return bool(switch_due(state.counter, t, params))


def basic_gradient_step(
    state: AgentState, f_now: float, f_prev: float | None, params: SimParams, rng: np.random.Generator
) -> tuple[AgentState, np.ndarray]:
    """Descend a decayed finite-difference estimate of the objective gradient.

    Without a previous objective value the step is the pure random part.
    """
    eta = rng.uniform(-1.0, 1.0, size=2)
    if f_prev is None:
        return replace(state, last_objective=f_now), descent_step(np.zeros(2), params.step_size, params.r_lambda, eta)
    slope = finite_difference(f_now - f_prev, state.displacement)
    grad = decay(state.grad_memory, slope, params.beta)
    step = descent_step(grad, params.step_size, params.r_lambda, eta)
    return replace(state, grad_memory=grad, last_objective=f_now), step


def intensity_gradient_estimate(state: AgentState, z_s_now: float, z_s_prev: float, beta: float) -> np.ndarray:
    slope = finite_difference(z_s_now - z_s_prev, state.displacement)
    return decay(state.intensity_gradient, slope, beta)


def extended_objective_gradient(z_s, z_col, n_neighbors, intensity_gradient):
    """``N/(N+1) * (z_s - z_col) * grad z_s``; zero for isolated agents."""
    n = np.asarray(n_neighbors, dtype=float)
    factor = n / (n + 1.0) * (np.asarray(z_s) - np.asarray(z_col))
    return np.asarray(factor)[..., None] * np.asarray(intensity_gradient)


def extended_gradient_step(
    state: AgentState, z_s: float, z_col: float, n_neighbors: int, params: SimParams, rng: np.random.Generator
) -> tuple[AgentState, np.ndarray]:
    eta = rng.uniform(-1.0, 1.0, size=2)
    zgrad = state.intensity_gradient
    if not np.isnan(state.last_sensed):
        zgrad = intensity_gradient_estimate(state, z_s, state.last_sensed, params.beta)
    grad = extended_objective_gradient(z_s, z_col, n_neighbors, zgrad)
    step = descent_step(grad, params.step_size, params.r_lambda, eta)
    return replace(state, intensity_gradient=zgrad, grad_memory=grad), step
