"""Unit tests for the equations of motion, RK4 step and propagator events."""

import math

import numpy as np
import pytest

from reentrysim.dynamics import (
    Environment,
    TerminationReason,
    TerminationSpec,
    VehicleParams,
    ZeroLift,
    _closest_approach,
    aero_accelerations,
    apply_deorbit_pulse,
    derivatives,
    ground_track,
    lift_basis,
    minimum_deorbit_delta_v,
    propagate,
    rk4_step,
    solve_deorbit,
    step_rk4,
    target_position,
)
from reentrysim.errors import ConfigError, ContractError, DeorbitError, DomainError
from reentrysim.state import MU_EARTH, R_EARTH, GuidanceCommand, PhaseId, State


def _circular_state(altitude):
    radius = R_EARTH + altitude
    return State(
        t=0.0,
        position=[radius, 0.0, 0.0],
        velocity=[0.0, math.sqrt(MU_EARTH / radius), 0.0],
    )


def _dropping_state(altitude, speed):
    return State(t=0.0, position=[R_EARTH + altitude, 0.0, 0.0], velocity=[-speed, 0.0, 0.0])


# ============================================================================
# Value types
# ============================================================================


@pytest.mark.unit
def test_vehicle_defaults_and_cy_max():
    vehicle = VehicleParams()
    assert (vehicle.mass, vehicle.ref_area, vehicle.k_over) == (1500.0, 2.0, 2.0)
    assert vehicle.cy_max == pytest.approx(0.5)


@pytest.mark.unit
@pytest.mark.parametrize("field", ["mass", "ref_area", "cx0", "k_over", "cy_alpha"])
def test_vehicle_rejects_non_positive(field):
    with pytest.raises(ConfigError) as exc_info:
        VehicleParams(**{field: 0.0})
    assert exc_info.value.field == field


@pytest.mark.unit
def test_environment_rejects_negative_multiplier():
    with pytest.raises(ConfigError):
        Environment(density_multiplier=-0.1)


@pytest.mark.unit
def test_state_from_entry_geometry():
    state = State.from_entry(100_000.0, 7600.0, math.radians(-12.0), math.radians(10.0))
    assert state.altitude == pytest.approx(100_000.0)
    assert state.speed == pytest.approx(7600.0)
    assert math.degrees(state.flight_path_angle) == pytest.approx(-12.0)
    assert state.velocity[2] > 0.0
    assert math.degrees(math.atan2(state.velocity[2], state.velocity[1])) == pytest.approx(10.0)


@pytest.mark.unit
def test_state_rejects_bad_shapes():
    with pytest.raises(ContractError):
        State(t=0.0, position=[1.0, 2.0], velocity=[0.0, 0.0, 0.0])


# ============================================================================
# Forces
# ============================================================================


@pytest.mark.unit
def test_vacuum_derivative_is_central_gravity():
    state = _circular_state(275_000.0)
    d = derivatives(state, GuidanceCommand(), VehicleParams(), 0.0)
    np.testing.assert_array_equal(d.d_position, state.velocity)
    assert np.linalg.norm(d.d_velocity) == pytest.approx(9.02, abs=0.01)
    assert d.d_velocity[0] < 0.0
    assert d.d_velocity[1] == 0.0


@pytest.mark.unit
def test_drag_formula():
    """0.5 * 1.225 * 100^2 * 0.1 * 2 / 1500 at sea level."""
    state = State(t=0.0, position=[R_EARTH, 0.0, 0.0], velocity=[0.0, 100.0, 0.0])
    drag, lift = aero_accelerations(state, GuidanceCommand(), VehicleParams(cx0=0.1), 1.0)
    assert np.linalg.norm(drag) == pytest.approx(0.8167, abs=1e-4)
    assert drag[1] < 0.0
    assert not lift.any()


@pytest.mark.unit
@pytest.mark.parametrize(
    "cy_vertical,cy_lateral", [(0.5, 0.0), (0.0, -0.5), (0.3, 0.4), (-0.2, 0.1)]
)
def test_lift_is_perpendicular_to_velocity(cy_vertical, cy_lateral):
    state = State.from_entry(40_000.0, 4000.0, math.radians(-7.0), math.radians(25.0))
    command = GuidanceCommand(cy_vertical=cy_vertical, cy_lateral=cy_lateral)
    vehicle = VehicleParams()
    _, lift = aero_accelerations(state, command, vehicle, 1.0)
    cosine = np.dot(lift, state.velocity) / (np.linalg.norm(lift) * state.speed)
    assert abs(cosine) < 1e-12

    rho = 0.0039921  # roughly 40 km
    expected = 0.5 * rho * 4000.0**2 * vehicle.ref_area * command.magnitude / vehicle.mass
    assert np.linalg.norm(lift) == pytest.approx(expected, rel=0.01)


@pytest.mark.unit
def test_lift_basis_orientation():
    state = State.from_entry(30_000.0, 3000.0, 0.0)
    up, lateral = lift_basis(state.position, state.velocity)
    np.testing.assert_allclose(up, [1.0, 0.0, 0.0], atol=1e-12)
    np.testing.assert_allclose(lateral, [0.0, 0.0, 1.0], atol=1e-12)


@pytest.mark.unit
def test_lift_basis_radial_velocity_is_still_orthonormal():
    up, lateral = lift_basis(np.array([R_EARTH, 0.0, 0.0]), np.array([-100.0, 0.0, 0.0]))
    assert np.linalg.norm(up) == pytest.approx(1.0)
    assert np.linalg.norm(lateral) == pytest.approx(1.0)
    assert abs(np.dot(up, [1.0, 0.0, 0.0])) < 1e-12
    assert abs(np.dot(up, lateral)) < 1e-12


@pytest.mark.unit
def test_command_above_cy_max_is_a_contract_error():
    state = State.from_entry(40_000.0, 3000.0, 0.0)
    with pytest.raises(ContractError, match="CY_max"):
        derivatives(state, GuidanceCommand(cy_vertical=0.6), VehicleParams(), 1.0)


# ============================================================================
# Integration step
# ============================================================================


@pytest.mark.unit
def test_rk4_step_exponential():
    """One step of dy/dt = y matches the fourth-order Taylor polynomial."""
    h = 0.1
    (y,) = rk4_step(lambda y: y, (1.0,), h)
    assert y == pytest.approx(1 + h + h**2 / 2 + h**3 / 6 + h**4 / 24, rel=1e-14)


@pytest.mark.unit
@pytest.mark.parametrize(
    ("altitude", "fpa_deg", "cy_vertical", "cy_lateral"),
    [(60_000.0, -3.0, -0.3, 0.0), (31_000.0, 1.0, 0.1, -0.2), (150_000.0, -10.0, 0.0, 0.0)],
)
def test_step_matches_vector_rk4(altitude, fpa_deg, cy_vertical, cy_lateral):
    """The scalar stage arithmetic agrees with classic RK4 on :func:`derivatives`."""
    state = State.from_entry(altitude, 5000.0, math.radians(fpa_deg), math.radians(10.0))
    command = GuidanceCommand(cy_vertical=cy_vertical, cy_lateral=cy_lateral)
    vehicle, dt = VehicleParams(), 0.05

    def rate(y):
        stage = State(t=0.0, position=y[:3], velocity=y[3:])
        d = derivatives(stage, command, vehicle, 1.3)
        return np.concatenate((d.d_position, d.d_velocity))

    y = np.concatenate((state.position, state.velocity))
    k1 = rate(y)
    k2 = rate(y + 0.5 * dt * k1)
    k3 = rate(y + 0.5 * dt * k2)
    k4 = rate(y + dt * k3)
    expected = y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    after = step_rk4(state, command, dt, vehicle, 1.3)
    np.testing.assert_allclose(after.position, expected[:3], rtol=0.0, atol=1e-6)
    np.testing.assert_allclose(after.velocity, expected[3:], rtol=0.0, atol=1e-9)


@pytest.mark.unit
def test_step_keeps_circular_radius():
    state = _circular_state(275_000.0)
    after = step_rk4(state, GuidanceCommand(), 0.02, VehicleParams(), 0.0)
    assert after.t == pytest.approx(0.02)
    assert abs(after.radius - state.radius) / state.radius < 1e-6


@pytest.mark.unit
def test_step_stamps_phase_and_alpha():
    state = State.from_entry(60_000.0, 5000.0, math.radians(-3.0))
    command = GuidanceCommand(cy_vertical=-0.3, phase=PhaseId.PULLUP)
    after = step_rk4(state, command, 0.02, VehicleParams(), 1.0)
    assert after.phase is PhaseId.PULLUP
    assert after.alpha == pytest.approx(-0.15)


@pytest.mark.unit
@pytest.mark.parametrize("dt", [0.0, -0.02])
def test_step_rejects_non_positive_dt(dt):
    with pytest.raises(ContractError):
        step_rk4(_circular_state(275_000.0), GuidanceCommand(), dt, VehicleParams(), 0.0)


# ============================================================================
# Propagation events
# ============================================================================


@pytest.mark.unit
def test_impact_within_first_step():
    """A 10 m drop at 1 km/s impacts inside one step: header row plus two samples."""
    trajectory = propagate(
        _dropping_state(10.0, 1000.0),
        ZeroLift(),
        VehicleParams(),
        Environment(),
        TerminationSpec(target_altitude=0.0, t_max=10.0, target_position=target_position(0.0)),
    )
    assert trajectory.termination.reason is TerminationReason.IMPACT
    assert len(trajectory.samples) == 2
    final = trajectory.final
    assert final.phase is PhaseId.DONE
    assert final.altitude == pytest.approx(0.0, abs=5e-3)
    assert final.t == pytest.approx(0.01, abs=2e-4)
    assert trajectory.termination.miss_distance < 1e-2
    assert [tr.to_phase for tr in trajectory.transitions] == [PhaseId.DONE]


@pytest.mark.unit
def test_start_below_impact_altitude_returns_immediately():
    trajectory = propagate(
        _dropping_state(-10.0, 10.0),
        ZeroLift(),
        VehicleParams(),
        Environment(),
        TerminationSpec(target_altitude=0.0, t_max=10.0),
    )
    assert trajectory.termination.reason is TerminationReason.IMPACT
    assert trajectory.samples == ()
    assert trajectory.flight_time == 0.0
    assert trajectory.termination.miss_distance is None


@pytest.mark.unit
def test_timeout_is_a_termination_reason():
    trajectory = propagate(
        _circular_state(275_000.0),
        ZeroLift(),
        VehicleParams(),
        Environment(0.0),
        TerminationSpec(target_altitude=None, t_max=1.0),
    )
    assert trajectory.termination.reason is TerminationReason.TIMEOUT
    assert not trajectory.succeeded
    assert trajectory.final.t == pytest.approx(1.0)
    assert trajectory.final.phase is PhaseId.DONE
    assert len(trajectory.samples) == 51

    times = trajectory.times()
    assert np.all(np.diff(times) > 0.0)
    np.testing.assert_allclose(np.diff(times), 0.02, atol=1e-12)


@pytest.mark.unit
def test_speed_floor():
    state = State.from_entry(1000.0, 300.0, 0.0)
    trajectory = propagate(
        state,
        ZeroLift(),
        VehicleParams(),
        Environment(),
        TerminationSpec(target_altitude=0.0, t_max=60.0, speed_floor=200.0),
    )
    assert trajectory.termination.reason is TerminationReason.SPEED_FLOOR
    assert trajectory.final.speed < 200.0
    assert trajectory.final.altitude > 0.0


@pytest.mark.unit
def test_numerical_failure_keeps_last_good_state():
    """With impact detection off the vehicle digs below the atmosphere floor."""
    trajectory = propagate(
        _dropping_state(100.0, 1000.0),
        ZeroLift(),
        VehicleParams(),
        Environment(),
        TerminationSpec(target_altitude=None, t_max=10.0),
    )
    assert trajectory.termination.reason is TerminationReason.NUMERICAL_FAILURE
    final = trajectory.final
    assert final.is_finite()
    assert final.altitude > -520.0
    assert final is trajectory.samples[-1].state


@pytest.mark.unit
def test_propagate_rejects_bad_arguments():
    with pytest.raises(ContractError):
        propagate(
            _circular_state(200_000.0), ZeroLift(), VehicleParams(), Environment(),
            TerminationSpec(), dt=0.0,
        )
    with pytest.raises(ContractError):
        TerminationSpec(target_altitude=None, t_max=None)


# ============================================================================
# Geometry and deorbit
# ============================================================================


@pytest.mark.unit
def test_target_position_and_ground_track_invert():
    point = target_position(700_000.0, 1500.0)
    assert np.linalg.norm(point) == pytest.approx(R_EARTH)
    downrange, crossrange = ground_track(point)
    assert downrange == pytest.approx(700_000.0, abs=1e-6)
    assert crossrange == pytest.approx(1500.0, abs=1e-6)


@pytest.mark.unit
def test_minimum_deorbit_delta_v():
    assert minimum_deorbit_delta_v(275_000.0, 100_000.0) == pytest.approx(51.9, abs=0.3)


@pytest.mark.unit
def test_deorbit_interface_state():
    solution = solve_deorbit(275_000.0, 120.0, 100_000.0)
    interface = solution.interface
    assert interface.altitude == pytest.approx(100_000.0, abs=1e-3)
    assert interface.position[1] == pytest.approx(0.0, abs=1e-6)
    assert interface.velocity[1] > 0.0
    assert interface.flight_path_angle < 0.0
    assert 15.0 <= solution.coast_time / 60.0 <= 25.0
    assert interface.speed == pytest.approx(7600.0, abs=300.0)
    assert interface.t == solution.coast_time
    assert solution.pulse.altitude == pytest.approx(275_000.0)
    assert interface.specific_energy == pytest.approx(solution.pulse.specific_energy, rel=1e-12)
    assert solution.perigee_altitude < 100_000.0
    assert apply_deorbit_pulse(275_000.0, 120.0, 100_000.0).speed == pytest.approx(interface.speed)


@pytest.mark.unit
def test_deorbit_pulse_too_small():
    with pytest.raises(DeorbitError) as exc_info:
        solve_deorbit(275_000.0, 30.0, 100_000.0)
    assert exc_info.value.required_delta_v == pytest.approx(51.9, abs=0.3)
    assert isinstance(exc_info.value, DomainError)


@pytest.mark.unit
@pytest.mark.parametrize(
    "orbit,delta_v,target",
    [(100_000.0, 100.0, 50_000.0), (600_000.0, 100.0, 100_000.0), (275_000.0, 0.0, 100_000.0)],
)
def test_deorbit_domain_errors(orbit, delta_v, target):
    with pytest.raises(DomainError):
        solve_deorbit(orbit, delta_v, target)


@pytest.mark.unit
def test_closest_approach_finds_interior_minimum():
    """A straight pass 3 m beside the target, with the minimum mid-step."""
    velocity = np.array([0.0, 2000.0, -500.0])
    before = State(t=0.0, position=[R_EARTH + 1_000.0, 0.0, 0.0], velocity=velocity)
    after = State(t=0.02, position=before.position + 0.02 * velocity, velocity=velocity)
    side = np.array([1.0, 0.0, 0.0])
    target = before.position + 0.37 * 0.02 * velocity + 3.0 * side
    assert _closest_approach(before, after, 0.02, 1.0, target) == pytest.approx(3.0, abs=1e-7)
    assert _closest_approach(before, after, 0.02, 0.2, target) == pytest.approx(
        np.linalg.norm(target - (before.position + 0.2 * 0.02 * velocity)), rel=1e-9
    )
