"""Integration tests for the propagator against analytic and self-consistency oracles."""

import math

import numpy as np
import pytest

from reentrysim.dynamics import (
    Environment,
    TerminationReason,
    TerminationSpec,
    VehicleParams,
    ZeroLift,
    propagate,
    solve_deorbit,
)
from reentrysim.guidance import Autopilot, GuidanceConfig
from reentrysim.state import MU_EARTH, R_EARTH, State


def conic_impact_point(state, radius):
    """Where the two-body conic through ``state`` first descends through ``radius``."""
    r, v = state.position, state.velocity
    h = np.cross(r, v)
    p = np.dot(h, h) / MU_EARTH
    e_vec = ((np.dot(v, v) - MU_EARTH / np.linalg.norm(r)) * r - np.dot(r, v) * v) / MU_EARTH
    e = np.linalg.norm(e_vec)
    e_hat = e_vec / e
    q_hat = np.cross(h / np.linalg.norm(h), e_hat)
    nu = -math.acos((p / radius - 1.0) / e)
    return radius * (math.cos(nu) * e_hat + math.sin(nu) * q_hat)


# ============================================================================
# Two-body oracles
# ============================================================================


@pytest.mark.integration
def test_vacuum_arc_matches_conic(vacuum):
    initial = State.from_entry(100_000.0, 6000.0, math.radians(-10.0), math.radians(20.0))
    trajectory = propagate(
        initial, ZeroLift(), VehicleParams(), vacuum, TerminationSpec(target_altitude=0.0)
    )
    assert trajectory.termination.reason is TerminationReason.IMPACT
    expected = conic_impact_point(initial, R_EARTH)
    assert np.linalg.norm(trajectory.final.position - expected) < 1.0


@pytest.mark.integration
def test_deorbit_coast_matches_analytic_interface(vacuum):
    """Integrating the coast numerically lands on the analytic interface state."""
    solution = solve_deorbit(275_000.0, 120.0, 100_000.0)
    trajectory = propagate(
        solution.pulse,
        ZeroLift(),
        VehicleParams(),
        vacuum,
        TerminationSpec(target_altitude=100_000.0, t_max=3600.0),
        dt=1.0,
    )
    assert trajectory.termination.reason is TerminationReason.IMPACT
    final = trajectory.final
    assert np.linalg.norm(final.position - solution.interface.position) < 1.0
    assert np.linalg.norm(final.velocity - solution.interface.velocity) < 1e-2
    assert final.t == pytest.approx(solution.coast_time, abs=1e-3)


@pytest.mark.integration
def test_deorbit_entry_conditions():
    """A 275 km orbit yields a 7.6 km/s entry after a coast of about 20 minutes."""
    solution = solve_deorbit(275_000.0, 120.0, 100_000.0)
    assert abs(solution.coast_time / 60.0 - 20.0) <= 5.0
    assert abs(solution.interface.speed - 7600.0) <= 300.0


# ============================================================================
# Self-consistency
# ============================================================================


@pytest.mark.integration
def test_rk4_self_convergence():
    """Differences between successive step halvings shrink like dt^4."""
    initial = State.from_entry(100_000.0, 1500.0, math.radians(-30.0))
    environment = Environment(density_multiplier=3e6)
    termination = TerminationSpec(target_altitude=None, t_max=4.0)

    finals = {}
    for dt in (0.08, 0.04, 0.02):
        trajectory = propagate(
            initial, ZeroLift(), VehicleParams(), environment, termination, dt=dt
        )
        assert trajectory.termination.reason is TerminationReason.TIMEOUT
        assert trajectory.final.t == pytest.approx(4.0)
        finals[dt] = trajectory.final.position

    coarse = np.linalg.norm(finals[0.08] - finals[0.04])
    fine = np.linalg.norm(finals[0.04] - finals[0.02])
    assert fine > 0.0
    assert coarse / fine > 12.0


@pytest.mark.integration
def test_energy_never_increases_in_atmosphere(entry_state):
    """Drag only removes energy and lift does no work."""
    autopilot = Autopilot(GuidanceConfig(), VehicleParams())
    trajectory = propagate(
        entry_state(100_000.0, 7600.0, -12.0),
        autopilot,
        VehicleParams(),
        Environment(),
        TerminationSpec(target_altitude=0.0, t_max=150.0),
    )
    energies = np.array([s.state.specific_energy for s in trajectory.samples])
    increase = np.diff(energies)
    assert np.all(increase <= 1e-9 * np.abs(energies[:-1]))
    assert len(autopilot.transitions) >= 2


@pytest.mark.integration
@pytest.mark.slow
def test_vacuum_energy_is_conserved(vacuum):
    radius = R_EARTH + 275_000.0
    initial = State(
        t=0.0,
        position=[radius, 0.0, 0.0],
        velocity=[0.0, math.sqrt(MU_EARTH / radius), 0.0],
    )
    trajectory = propagate(
        initial,
        ZeroLift(),
        VehicleParams(),
        vacuum,
        TerminationSpec(target_altitude=None, t_max=2000.0),
    )
    assert len(trajectory.samples) == 100_001
    energies = np.array([s.state.specific_energy for s in trajectory.samples])
    drift = np.abs(energies - initial.specific_energy) / abs(initial.specific_energy)
    assert drift.max() < 1e-9
