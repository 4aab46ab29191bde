"""World state and the synchronous per-timestep schedule.

Every tick reads one snapshot of the swarm and writes a fresh one, so the
result never depends on the order agents are visited in.  Random draws are
taken for all agents on every tick in a fixed layout (turn angles, descent
noise, sensing noise), which keeps the stream independent of how many
agents happen to be exploring.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from . import agent as rules
from .agent import AgentState, Phase
from .environment import field_values, fold_into, ground_truth_mean
from .metrics import MetricsSample, sample_metrics
from .params import EstimateSource, GradientMode, SimParams
from .spatial import adjacency


@dataclass
class Swarm:
    """Structure-of-arrays view of all agent states."""

    position: np.ndarray
    last_position: np.ndarray
    heading: np.ndarray
    exploiting: np.ndarray
    memory: np.ndarray
    grad_memory: np.ndarray
    intensity_gradient: np.ndarray
    min_seen: np.ndarray
    max_seen: np.ndarray
    lag: np.ndarray
    counter: np.ndarray
    switch_time: np.ndarray
    sensed: np.ndarray
    last_sensed: np.ndarray
    last_objective: np.ndarray

    def __len__(self) -> int:
        return len(self.position)

    def copy(self) -> Swarm:
        return Swarm(**{k: v.copy() for k, v in vars(self).items()})

    def permuted(self, order) -> Swarm:
        return Swarm(**{k: v[order].copy() for k, v in vars(self).items()})

    def agent(self, i: int) -> AgentState:
        switch = int(self.switch_time[i])
        last_obj = float(self.last_objective[i])
        return AgentState(
            position=self.position[i].copy(),
            heading=float(self.heading[i]),
            phase=Phase.EXPLOITING if self.exploiting[i] else Phase.EXPLORING,
            memory=float(self.memory[i]),
            last_position=self.last_position[i].copy(),
            grad_memory=self.grad_memory[i].copy(),
            intensity_gradient=self.intensity_gradient[i].copy(),
            min_seen=float(self.min_seen[i]),
            max_seen=float(self.max_seen[i]),
            lag=float(self.lag[i]),
            counter=int(self.counter[i]),
            switch_time=None if switch < 0 else switch,
            last_sensed=float(self.last_sensed[i]),
            last_objective=None if np.isnan(last_obj) else last_obj,
        )

    @property
    def agents(self) -> list[AgentState]:
        return [self.agent(i) for i in range(len(self))]


@dataclass
class World:
    swarm: Swarm
    params: SimParams
    rng: np.random.Generator
    z_gt: float
    t: int = 0

    @property
    def arena(self):
        return self.params.arena

    @property
    def field(self):
        return self.params.field

    @property
    def agents(self) -> list[AgentState]:
        return self.swarm.agents


def _sense(params: SimParams, positions: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    noise = rng.standard_normal(len(positions))
    g = field_values(params.field, params.arena, positions)
    return g + params.field.sigma * noise if params.field.sigma else g


def init_world(params: SimParams, rng: np.random.Generator | None = None) -> World:
    """Scatter agents uniformly over the placement patch and take the first measurement."""
    params.validate()
    rng = np.random.default_rng(params.seed) if rng is None else rng
    n = params.n_agents
    patch = params.patch
    position = np.asarray(patch.corner(params.arena)) + rng.uniform(0.0, 1.0, size=(n, 2)) * [patch.width, patch.height]
    heading = rules.wrap_angle(rng.uniform(-np.pi, np.pi, size=n))
    nan = np.full(n, np.nan)
    swarm = Swarm(
        position=position,
        last_position=position.copy(),
        heading=heading,
        exploiting=np.zeros(n, dtype=bool),
        memory=nan.copy(),
        grad_memory=np.zeros((n, 2)),
        intensity_gradient=np.zeros((n, 2)),
        min_seen=nan.copy(),
        max_seen=nan.copy(),
        lag=nan.copy(),
        counter=np.zeros(n, dtype=np.int64),
        switch_time=np.full(n, -1, dtype=np.int64),
        sensed=_sense(params, position, rng),
        last_sensed=nan.copy(),
        last_objective=nan.copy(),
    )
    return World(swarm=swarm, params=params, rng=rng, z_gt=ground_truth_mean(params.field, params.arena))


def neighbors(world: World, i: int) -> list[int]:
    """Exploiting agents strictly within communication range of agent ``i``."""
    s = world.swarm
    d2 = np.sum((s.position - s.position[i]) ** 2, axis=1)
    mask = (d2 < world.params.comm_range**2) & s.exploiting
    mask[i] = False
    return [int(j) for j in np.flatnonzero(mask)]


def tick(world: World) -> World:
    """Advance the world by one synchronous timestep."""
    p = world.params
    s = world.swarm
    t = world.t
    rng = world.rng
    if t >= p.t_f:
        raise ValueError(f"run already finished (t={t}, t_f={p.t_f})")
    nxt = s.copy()
    z = s.sensed

    # Exploration trackers and the switch decision.
    exploring = ~s.exploiting
    lo, hi, lag, counter, z_avg, _ = rules.advance_trackers(
        s.min_seen, s.max_seen, s.lag, s.counter, z, p.beta_lag, p.delta_prec
    )
    nxt.min_seen = np.where(exploring, lo, s.min_seen)
    nxt.max_seen = np.where(exploring, hi, s.max_seen)
    nxt.lag = np.where(exploring, lag, s.lag)
    nxt.counter = np.where(exploring, counter, s.counter)
    switching = exploring & rules.switch_due(nxt.counter, t, p)
    exploiting = s.exploiting | switching
    nxt.exploiting = exploiting
    nxt.switch_time = np.where(switching, t, s.switch_time)

    memory = s.memory.copy()
    memory[switching] = (z_avg if p.memory_init is EstimateSource.ZAVG else z)[switching]
    grad_memory = np.where(switching[:, None], 0.0, s.grad_memory)
    zgrad = np.where(switching[:, None], 0.0, s.intensity_gradient)
    last_objective = np.where(switching, np.nan, s.last_objective)

    zeta = rng.uniform(-np.pi, np.pi, size=len(s))
    eta = rng.uniform(-1.0, 1.0, size=(len(s), 2))

    # Exploitation: aggregate from the pre-tick memory snapshot, then descend.
    step = np.zeros_like(s.position)
    if exploiting.any():
        adj = adjacency(s.position, p.comm_range, exploiting, p.neighbor_search)
        deg = adj.sum(axis=1)
        z_col = (z + adj.astype(float) @ np.where(exploiting, memory, 0.0)) / (1.0 + deg)
        nxt.memory = np.where(exploiting, rules.memory_update(memory, z_col, p.alpha), memory)

        displacement = s.position - s.last_position
        if p.gradient_mode is GradientMode.EXTENDED:
            has_prev = ~np.isnan(s.last_sensed)
            slope = rules.finite_difference(np.where(has_prev, z - s.last_sensed, 0.0), displacement)
            zgrad = np.where((exploiting & has_prev)[:, None], rules.decay(zgrad, slope, p.beta), zgrad)
            grad = rules.extended_objective_gradient(z, z_col, deg, zgrad)
            grad_memory = np.where(exploiting[:, None], grad, grad_memory)
        else:
            f = rules.objective(z, z_col)
            has_prev = exploiting & ~np.isnan(last_objective)
            slope = rules.finite_difference(np.where(has_prev, f - last_objective, 0.0), displacement)
            grad_memory = np.where(has_prev[:, None], rules.decay(grad_memory, slope, p.beta), grad_memory)
            grad = np.where(has_prev[:, None], grad_memory, 0.0)
            last_objective = np.where(exploiting, f, last_objective)
        exploit_step = rules.descent_step(grad, p.step_size, p.r_lambda, eta)
        step = np.where(exploiting[:, None], exploit_step, step)
    else:
        nxt.memory = memory
    nxt.grad_memory = grad_memory
    nxt.intensity_gradient = zgrad
    nxt.last_objective = last_objective

    # Exploration: correlated random walk.
    still_exploring = ~exploiting
    heading = np.where(still_exploring, rules.wrap_angle(s.heading + p.r_psi * zeta), s.heading)
    walk = p.step_size * np.stack([np.cos(heading), np.sin(heading)], axis=1)
    step = np.where(still_exploring[:, None], walk, step)

    position, flipped = fold_into(p.arena, s.position + step)
    bounced = still_exploring & flipped.any(axis=1)
    if bounced.any():
        heading = np.where(bounced, rules.mirror_heading(heading, flipped), heading)

    nxt.heading = heading
    nxt.last_position = s.position.copy()
    nxt.position = position
    nxt.last_sensed = z.copy()
    nxt.sensed = _sense(p, position, rng)
    world.swarm = nxt
    world.t = t + 1
    return world


def current_estimates(world: World) -> np.ndarray:
    """Per-agent opinion: memory once exploiting, otherwise the configured stand-in."""
    s = world.swarm
    if world.params.estimate_before_switch is EstimateSource.ZAVG:
        before = np.where(np.isnan(s.min_seen), s.sensed, 0.5 * (s.min_seen + s.max_seen))
    else:
        before = s.sensed
    return np.where(s.exploiting, s.memory, before)


def measure(world: World) -> MetricsSample:
    s = world.swarm
    return sample_metrics(world.t, current_estimates(world), world.z_gt, float(s.exploiting.mean()))


@dataclass
class RunRecord:
    seed: int
    params: dict
    z_gt: float
    samples: list[MetricsSample] = field(default_factory=list)
    switch_times: list[int | None] = field(default_factory=list)
    initial_positions: list[list[float]] = field(default_factory=list)
    final_positions: list[list[float]] = field(default_factory=list)
    final_estimates: list[float] = field(default_factory=list)

    @property
    def final(self) -> MetricsSample:
        return self.samples[-1]

    def series(self, name: str) -> np.ndarray:
        return np.array([getattr(m, name) for m in self.samples])

    def to_json(self) -> str:
        data = {
            "seed": self.seed,
            "params": self.params,
            "z_gt": self.z_gt,
            "samples": [vars(m) for m in self.samples],
            "switch_times": self.switch_times,
            "initial_positions": self.initial_positions,
            "final_positions": self.final_positions,
            "final_estimates": self.final_estimates,
        }
        return json.dumps(data, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> RunRecord:
        data = json.loads(text)
        data["samples"] = [MetricsSample(**m) for m in data["samples"]]
        return cls(**data)


def run(
    params: SimParams,
    recorder: Callable[[MetricsSample], None] | None = None,
    world_hook: Callable[[World], None] | None = None,
) -> RunRecord:
    """Simulate ``t_f`` ticks, sampling metrics every ``record_stride`` ticks and at the end."""
    world = init_world(params)
    record = RunRecord(
        seed=params.seed,
        params=params.to_dict(),
        z_gt=world.z_gt,
        initial_positions=world.swarm.position.tolist(),
    )

    def emit():
        sample = measure(world)
        record.samples.append(sample)
        if recorder is not None:
            recorder(sample)

    emit()
    while world.t < params.t_f:
        tick(world)
        if world_hook is not None:
            world_hook(world)
        if world.t % params.record_stride == 0 or world.t == params.t_f:
            emit()
    s = world.swarm
    record.switch_times = [None if v < 0 else int(v) for v in s.switch_time]
    record.final_positions = s.position.tolist()
    record.final_estimates = current_estimates(world).tolist()
    return record


def with_seed(params: SimParams, seed: int) -> SimParams:
    return replace(params, seed=int(seed))
