from dataclasses import replace

import numpy as np
import pytest
from scipy.stats import spearmanr

from conftest import exploiting_world, ring
from swarmest.engine import RunRecord, current_estimates, init_world, neighbors, run, tick
from swarmest.environment import Arena, FieldSpec, field_values
from swarmest.params import Patch, SimParams, SwitchMode


def test_init_world_inside_patch():
    p = SimParams(patch=Patch(0.7, 0.7, origin=(0.0, 0.0)))
    w = init_world(p)
    x = w.swarm.position
    assert x.shape == (100, 2)
    assert np.all((x >= 0) & (x <= 0.7))
    assert not w.swarm.exploiting.any()
    assert np.all((w.swarm.heading > -np.pi) & (w.swarm.heading <= np.pi))


def test_default_patch_is_centred():
    w = init_world(SimParams())
    x = w.swarm.position
    assert np.all((x >= 0.35) & (x <= 1.05))


def test_init_world_single_agent_and_determinism():
    p = SimParams(n_agents=1, seed=4)
    a, b = init_world(p), init_world(p)
    assert len(a.swarm) == 1
    assert np.array_equal(a.swarm.position, b.swarm.position)
    assert np.array_equal(a.swarm.sensed, b.swarm.sensed)


def test_patch_outside_arena_is_rejected():
    with pytest.raises(ValueError, match="patch"):
        SimParams(arena=Arena(1.0, 1.0), patch=Patch(0.7, 0.7, origin=(0.5, 0.0)))


def test_neighbor_rules(flat_params):
    p = replace(flat_params, n_agents=4)
    pos = [[0.5, 0.5], [0.79, 0.5], [0.5, 0.8], [0.6, 0.6]]
    w = exploiting_world(p, pos, 0.0)
    w.swarm.exploiting[3] = False
    assert neighbors(w, 0) == [1]  # 0.29 apart: linked; 0.30 apart: not
    assert neighbors(w, 1) == [0]
    assert neighbors(w, 2) == []
    # Exploring agents are never neighbours, but see exploiting ones.
    assert 3 not in neighbors(w, 0)


def test_all_exploring_tick_is_independent_walks():
    p = SimParams(n_agents=20, t_sw=10**6, t_f=10**6)
    w = init_world(p)
    before = w.swarm.position.copy()
    tick(w)
    step = np.linalg.norm(w.swarm.position - before, axis=1)
    np.testing.assert_allclose(step, p.step_size, rtol=1e-9)
    assert np.all(np.isnan(w.swarm.memory))


def test_two_agent_consensus_matches_closed_form(flat_params):
    # Constant field c: deviations e = m - c follow e1' = a e1 + (1-a) e2 / 2.
    # Sum and difference decouple with factors (1+a)/2 and (3a-1)/2.
    p = replace(flat_params, n_agents=2)
    a, c = p.alpha, 0.5
    w = exploiting_world(p, [[0.6, 0.6], [0.7, 0.6]], [0.0, 1.0])
    e0 = np.array([0.0, 1.0]) - c
    s0, d0 = e0.sum(), e0[0] - e0[1]
    for k in range(1, 3001):
        tick(w)
        s_k = s0 * ((1 + a) / 2) ** k
        d_k = d0 * ((3 * a - 1) / 2) ** k
        expected = c + np.array([s_k + d_k, s_k - d_k]) / 2
        np.testing.assert_allclose(w.swarm.memory, expected, atol=1e-12)
    assert abs(w.swarm.memory[0] - w.swarm.memory[1]) < 1e-6


def test_lone_exploiter_converges_to_local_value():
    field = FieldSpec.plane(1.0, 0.0, sigma=0.0)
    p = SimParams(n_agents=1, step_size=0.0, field=field, t_f=10**6)
    w = exploiting_world(p, [[0.9, 0.4]], [0.0])
    for _ in range(3000):
        tick(w)
    assert w.swarm.memory[0] == pytest.approx(0.9, abs=1e-6)


def test_spread_non_increasing_on_connected_graph(flat_params):
    w = exploiting_world(flat_params, ring(10, 0.2), np.linspace(0, 1, 10))
    spread = np.ptp(w.swarm.memory)
    for _ in range(500):
        tick(w)
        nxt = np.ptp(w.swarm.memory)
        assert nxt <= spread + 1e-15
        spread = nxt


def test_exploring_memory_untouched():
    p = SimParams(n_agents=30, t_sw=10**6, t_f=100)
    w = init_world(p)
    for _ in range(50):
        tick(w)
    assert np.all(np.isnan(w.swarm.memory))


def test_positions_stay_inside_arena():
    p = SimParams(n_agents=40, step_size=0.02, t_sw=150, t_f=300, arena=Arena(1.0, 1.0))
    w = init_world(p)
    for _ in range(300):
        tick(w)
        assert np.all(p.arena.contains(w.swarm.position))


def test_phase_is_monotone_and_switch_time_set_once():
    p = SimParams(n_agents=30, switch_mode=SwitchMode.ADAPTIVE, delta_prec=1e-3, t_f=800)
    w = init_world(p)
    prev = w.swarm.exploiting.copy()
    prev_time = w.swarm.switch_time.copy()
    for _ in range(800):
        tick(w)
        now = w.swarm.exploiting
        assert np.all(now >= prev)
        fixed = prev_time >= 0
        assert np.array_equal(w.swarm.switch_time[fixed], prev_time[fixed])
        assert np.all((w.swarm.switch_time >= 0) == now)
        prev, prev_time = now.copy(), w.swarm.switch_time.copy()


def test_tick_is_permutation_invariant():
    # No randomness reaches the dynamics: headings fixed, no descent noise, no sensing noise.
    p = SimParams(n_agents=25, r_psi=0.0, r_lambda=0.0, t_sw=40, t_f=200, field=FieldSpec(sigma=0.0))
    w1 = init_world(p)
    order = np.random.default_rng(1).permutation(25)
    w2 = init_world(p)
    w2.swarm = w2.swarm.permuted(order)
    for _ in range(120):
        tick(w1)
        tick(w2)
    s1, s2 = w1.swarm.permuted(order), w2.swarm
    # Neighbour sums are taken in index order, so only rounding may differ.
    np.testing.assert_allclose(s1.position, s2.position, rtol=0, atol=1e-12)
    np.testing.assert_allclose(s1.memory, s2.memory, rtol=0, atol=1e-12)
    assert w1.swarm.exploiting.all()


def test_switching_agents_aggregate_in_same_tick(flat_params):
    p = replace(flat_params, n_agents=2, t_sw=0)
    w = init_world(p)
    w.swarm.position[:] = [[0.6, 0.6], [0.7, 0.6]]
    tick(w)
    assert w.swarm.exploiting.all()
    # Memory starts at the sensed 0.5 and is then averaged in the same tick.
    np.testing.assert_allclose(w.swarm.memory, 0.5)
    assert np.all(w.swarm.switch_time == 0)


def test_tick_past_end_raises():
    w = init_world(SimParams(n_agents=2, t_f=1))
    tick(w)
    with pytest.raises(ValueError):
        tick(w)


def test_run_empty_and_fixed_switch():
    r0 = run(SimParams(n_agents=5, t_f=0))
    assert len(r0.samples) == 1 and r0.samples[0].t == 0
    r = run(SimParams(n_agents=10, t_f=60, t_sw=30, record_stride=25))
    assert [m.t for m in r.samples] == [0, 25, 50, 60]
    assert r.switch_times == [30] * 10


def test_run_is_byte_deterministic():
    p = SimParams(n_agents=15, t_f=200, t_sw=100, seed=12)
    a, b = run(p).to_json(), run(p).to_json()
    assert a == b
    assert RunRecord.from_json(a).to_json() == a
    assert run(replace(p, seed=13)).to_json() != a


def test_grid_and_brute_runs_agree():
    p = SimParams(n_agents=40, t_f=300, t_sw=100, seed=3)
    a = run(p)
    b = run(replace(p, neighbor_search="grid"))
    assert a.final_estimates == b.final_estimates
    assert a.final_positions == b.final_positions


def test_estimates_before_switch_follow_configured_source():
    p = SimParams(n_agents=10, t_f=50, t_sw=10**6)
    w = init_world(p)
    for _ in range(20):
        tick(w)
    np.testing.assert_array_equal(current_estimates(w), w.swarm.sensed)
    w.params = replace(p, estimate_before_switch="zavg")
    np.testing.assert_allclose(current_estimates(w), 0.5 * (w.swarm.min_seen + w.swarm.max_seen))


def test_collective_converges_on_cone():
    # Mean |z_s - z_col| in 100-tick windows.  Noise-free so the trend is not
    # masked by the sensing-noise floor; the residual floor comes from the
    # random part of the descent step, so only the trend is checked.
    p = SimParams(n_agents=100, t_sw=0, t_f=3000, seed=5).with_sigma(0.0)
    gaps = []

    def hook(world):
        s = world.swarm
        adj = np.linalg.norm(s.position[:, None] - s.position[None], axis=2) < p.comm_range
        np.fill_diagonal(adj, False)
        z_col = (s.last_sensed + adj @ s.memory) / (1 + adj.sum(1))
        gaps.append(np.mean(np.abs(s.last_sensed - z_col)))

    run(p, world_hook=hook)
    windows = np.array(gaps).reshape(-1, 100).mean(axis=1)
    assert windows[-1] < 0.05 * windows[0]
    rho = spearmanr(np.arange(15), windows[:15]).statistic
    assert rho < -0.9


def test_final_positions_approach_mean_contour():
    p = SimParams(n_agents=100, seed=2)
    r = run(p)
    g0 = field_values(p.field, p.arena, np.array(r.initial_positions))
    gf = field_values(p.field, p.arena, np.array(r.final_positions))
    assert np.mean(np.abs(gf - r.z_gt)) < np.mean(np.abs(g0 - r.z_gt))
