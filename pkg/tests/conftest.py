import numpy as np
import pytest

from swarmest.engine import _sense, init_world
from swarmest.environment import Arena, FieldSpec
from swarmest.params import SimParams

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


def exploiting_world(params: SimParams, positions, memories):
    """World whose agents already exploit, placed at ``positions`` with given memories."""
    world = init_world(params)
    s = world.swarm
    s.position[:] = positions
    s.last_position[:] = positions
    s.exploiting[:] = True
    s.switch_time[:] = 0
    s.memory[:] = memories
    s.sensed = _sense(params, s.position, world.rng)
    return world


def ring(n, radius, centre=(0.7, 0.7)):
    a = 2 * np.pi * np.arange(n) / n
    return np.stack([centre[0] + radius * np.cos(a), centre[1] + radius * np.sin(a)], axis=1)


@pytest.fixture
def flat_params():
    """Static agents on a constant field at 0.5 with noise-free sensing."""
    return SimParams(
        n_agents=10,
        arena=Arena(1.4, 1.4),
        step_size=0.0,
        field=FieldSpec.plane(0.0, 0.0, offset=0.5, sigma=0.0),
        t_f=10**6,
    )
