"""Point-mass equations of motion, RK4 propagation and deorbit initialization.

Spherical non-rotating Earth with inverse-square gravity. Aerodynamics use a
flat polar: drag coefficient ``cx0`` regardless of lift, lift coefficient
commanded directly up to ``k_over * cx0``. Commands are held constant across
each step.
"""

from __future__ import annotations

import enum
import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field, replace
from typing import Protocol

import numpy as np
from scipy.optimize import minimize_scalar

from . import atmosphere
from .errors import ConfigError, ContractError, DeorbitError, DomainError
from .state import (
    MU_EARTH,
    R_EARTH,
    Derivative,
    GuidanceCommand,
    PhaseId,
    PhaseTransition,
    State,
)

logger = logging.getLogger(__name__)

MIN_RADIUS = 6_200_000.0
EVENT_TIME_TOLERANCE = 1e-6  # s
MIN_ORBIT_ALTITUDE = 150_000.0
MAX_ORBIT_ALTITUDE = 500_000.0

_CY_SLACK = 1e-12
_MISS_GRID = 65
_MISS_XATOL = 1e-10  # fraction of a step
_PERIGEE_TOLERANCE = 1e-3  # m


@dataclass(frozen=True)
class VehicleParams:
    """Mass and aerodynamic model of the vehicle.

    ``k_over`` is the maximum lift-to-drag ratio, so the largest usable lift
    coefficient is ``k_over * cx0``. ``cy_alpha`` only converts the commanded
    lift coefficient to the reported angle of attack.
    """

    mass: float = 1500.0
    ref_area: float = 2.0
    cx0: float = 0.25
    k_over: float = 2.0
    cy_alpha: float = 2.0

    def __post_init__(self) -> None:
        for name in ("mass", "ref_area", "cx0", "k_over", "cy_alpha"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ConfigError(name, f"must be positive, got {value!r}")

    @property
    def cy_max(self) -> float:
        return self.k_over * self.cx0

    def alpha_for(self, command: GuidanceCommand) -> float:
        """Diagnostic angle of attack for a command, signed by the vertical channel."""
        sign = -1.0 if command.cy_vertical < 0.0 else 1.0
        return sign * command.magnitude / self.cy_alpha


@dataclass(frozen=True)
class Environment:
    density_multiplier: float = 1.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.density_multiplier) and self.density_multiplier >= 0.0):
            raise ConfigError(
                "density_multiplier",
                f"must be non-negative, got {self.density_multiplier!r}",
            )


@dataclass(frozen=True, eq=False)
class TerminationSpec:
    """Stop conditions for :func:`propagate`.

    Attributes:
        target_altitude (float | None): Impact sphere altitude, m. None disables impact detection.
        t_max (float | None): Absolute time limit, s.
        speed_floor (float | None): Stop once speed falls below this, m/s.
        target_position (np.ndarray | None): Aim point used for the miss distance.
    """

    target_altitude: float | None = 0.0
    t_max: float | None = 3600.0
    speed_floor: float | None = None
    target_position: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.target_altitude is None and self.t_max is None and self.speed_floor is None:
            raise ContractError("termination needs at least one stop condition")
        if self.t_max is not None and not self.t_max > 0.0:
            raise ConfigError("t_max", f"must be positive, got {self.t_max!r}")
        if self.speed_floor is not None and not self.speed_floor >= 0.0:
            raise ConfigError("speed_floor", f"must be non-negative, got {self.speed_floor!r}")
        if self.target_position is not None:
            object.__setattr__(
                self, "target_position", np.asarray(self.target_position, dtype=np.float64)
            )


class TerminationReason(enum.Enum):
    IMPACT = "impact"
    TIMEOUT = "timeout"
    SPEED_FLOOR = "speed-floor"
    NUMERICAL_FAILURE = "numerical-failure"


@dataclass(frozen=True, slots=True)
class TrajectorySample:
    state: State
    command: GuidanceCommand
    mach: float
    dynamic_pressure: float
    load_factor: float


@dataclass(frozen=True, slots=True)
class Termination:
    reason: TerminationReason
    state: State
    miss_distance: float | None = None

    @property
    def t(self) -> float:
        return self.state.t

    @property
    def impact_point(self) -> np.ndarray:
        return self.state.position


@dataclass(frozen=True)
class Trajectory:
    """Result of one propagation.

    Samples are spaced by ``dt`` except the last one, which is the refined
    event state when the run ended on impact.
    """

    initial: State
    samples: tuple[TrajectorySample, ...]
    termination: Termination
    transitions: tuple[PhaseTransition, ...] = ()
    dt: float = 0.02

    @property
    def final(self) -> State:
        return self.termination.state

    @property
    def flight_time(self) -> float:
        return self.final.t - self.initial.t

    @property
    def succeeded(self) -> bool:
        return self.termination.reason is TerminationReason.IMPACT

    def phase_times(self) -> dict[str, float]:
        """Time at which each phase was entered, keyed by phase label."""
        return {tr.to_phase.label: tr.t for tr in self.transitions}

    def transition_to(self, phase: PhaseId) -> PhaseTransition | None:
        for transition in self.transitions:
            if transition.to_phase is phase:
                return transition
        return None

    def times(self) -> np.ndarray:
        return np.array([s.state.t for s in self.samples])

    @property
    def peak_load_factor(self) -> float:
        return max((s.load_factor for s in self.samples), default=0.0)

    @property
    def peak_dynamic_pressure(self) -> float:
        return max((s.dynamic_pressure for s in self.samples), default=0.0)


class Controller(Protocol):
    """Anything that emits one command per step; :class:`Autopilot` is the real one."""

    transitions: list[PhaseTransition]

    def command(self, state: State) -> GuidanceCommand: ...

    def finish(self, state: State) -> None: ...


@dataclass
class ZeroLift:
    """Ballistic controller: zero lift in a fixed phase."""

    phase: PhaseId = PhaseId.ENTRY
    transitions: list[PhaseTransition] = field(default_factory=list)

    def command(self, state: State) -> GuidanceCommand:
        return GuidanceCommand(phase=self.phase)

    def finish(self, state: State) -> None:
        self.transitions.append(PhaseTransition.at(state, self.phase, PhaseId.DONE))


# ---------------------------------------------------------------------------
# Forces
# ---------------------------------------------------------------------------


def _norm(v: np.ndarray) -> float:
    return math.sqrt(float(np.dot(v, v)))


def lift_basis(position: np.ndarray, velocity: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Unit vectors (up, lateral) perpendicular to the velocity.

    ``up`` lies in the plane of position and velocity on the outward side;
    ``lateral = up x v_hat`` is horizontal. When the velocity is radial the
    plane is undefined and an arbitrary perpendicular pair is returned.
    """
    v_hat = velocity / _norm(velocity)
    r_hat = position / _norm(position)
    up = r_hat - float(np.dot(r_hat, v_hat)) * v_hat
    size = _norm(up)
    if size < 1e-9:
        trial = np.array([0.0, 0.0, 1.0]) if abs(v_hat[2]) < 0.9 else np.array([0.0, 1.0, 0.0])
        up = trial - float(np.dot(trial, v_hat)) * v_hat
        size = _norm(up)
    up = up / size
    return up, np.cross(up, v_hat)


def gravity(position: np.ndarray) -> np.ndarray:
    r2 = float(np.dot(position, position))
    return -MU_EARTH * position / (r2 * math.sqrt(r2))


def _aero(
    position: np.ndarray,
    velocity: np.ndarray,
    cy_vertical: float,
    cy_lateral: float,
    vehicle: VehicleParams,
    density_multiplier: float,
) -> tuple[np.ndarray, np.ndarray]:
    speed = _norm(velocity)
    if density_multiplier == 0.0 or speed == 0.0:
        zero = np.zeros(3)
        return zero, zero
    rho = atmosphere.sample(_norm(position) - R_EARTH).density * density_multiplier
    scale = 0.5 * rho * vehicle.ref_area / vehicle.mass
    drag = -scale * speed * vehicle.cx0 * velocity
    if cy_vertical == 0.0 and cy_lateral == 0.0:
        return drag, np.zeros(3)
    up, lateral = lift_basis(position, velocity)
    lift = scale * speed * speed * (cy_vertical * up + cy_lateral * lateral)
    return drag, lift


def _check_command(command: GuidanceCommand, vehicle: VehicleParams) -> None:
    if command.magnitude > vehicle.cy_max * (1.0 + _CY_SLACK):
        raise ContractError(
            f"lift command {command.magnitude:.6g} exceeds CY_max {vehicle.cy_max:.6g}"
        )


def aero_accelerations(
    state: State, command: GuidanceCommand, vehicle: VehicleParams, density_multiplier: float
) -> tuple[np.ndarray, np.ndarray]:
    """Drag and lift accelerations (m/s^2) for a state under a command."""
    _check_command(command, vehicle)
    return _aero(
        state.position,
        state.velocity,
        command.cy_vertical,
        command.cy_lateral,
        vehicle,
        density_multiplier,
    )


def derivatives(
    state: State, command: GuidanceCommand, vehicle: VehicleParams, density_multiplier: float
) -> Derivative:
    """Time derivative of position and velocity.

    Raises:
        ContractError: If the command exceeds the vehicle's lift capability.
    """
    drag, lift = aero_accelerations(state, command, vehicle, density_multiplier)
    return Derivative(
        d_position=state.velocity,
        d_velocity=gravity(state.position) + drag + lift,
    )


# ---------------------------------------------------------------------------
# Integration
# ---------------------------------------------------------------------------


def rk4_step(
    rate: Callable[[tuple[float, ...]], tuple[float, ...]], y: tuple[float, ...], dt: float
) -> tuple[float, ...]:
    """One classic Runge-Kutta step of ``dy/dt = rate(y)`` on a tuple of floats."""
    half = 0.5 * dt
    k1 = rate(y)
    k2 = rate(tuple(a + half * b for a, b in zip(y, k1)))
    k3 = rate(tuple(a + half * b for a, b in zip(y, k2)))
    k4 = rate(tuple(a + dt * b for a, b in zip(y, k3)))
    sixth = dt / 6.0
    return tuple(
        a + sixth * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
        for a, b1, b2, b3, b4 in zip(y, k1, k2, k3, k4)
    )


def _stage_rate(
    y: tuple[float, ...],
    cy_vertical: float,
    cy_lateral: float,
    vehicle: VehicleParams,
    density_multiplier: float,
) -> tuple[float, ...]:
    """Scalar form of :func:`derivatives` for one RK4 stage."""
    x, y_, z, vx, vy, vz = y
    r2 = x * x + y_ * y_ + z * z
    r = math.sqrt(r2)
    g = -MU_EARTH / (r2 * r)
    ax, ay, az = g * x, g * y_, g * z
    speed = math.sqrt(vx * vx + vy * vy + vz * vz)
    if density_multiplier == 0.0 or speed == 0.0:
        return vx, vy, vz, ax, ay, az

    scale = (
        0.5
        * atmosphere.density(r - R_EARTH)
        * density_multiplier
        * vehicle.ref_area
        / vehicle.mass
        * speed
    )
    drag = scale * vehicle.cx0
    ax -= drag * vx
    ay -= drag * vy
    az -= drag * vz
    if cy_vertical == 0.0 and cy_lateral == 0.0:
        return vx, vy, vz, ax, ay, az

    ux, uy, uz = vx / speed, vy / speed, vz / speed
    rx, ry, rz = x / r, y_ / r, z / r
    along = rx * ux + ry * uy + rz * uz
    px, py, pz = rx - along * ux, ry - along * uy, rz - along * uz
    size = math.sqrt(px * px + py * py + pz * pz)
    if size < 1e-9:
        up, lateral = lift_basis(np.array([x, y_, z]), np.array([vx, vy, vz]))
        px, py, pz = (float(c) for c in up)
        lx, ly, lz = (float(c) for c in lateral)
    else:
        px, py, pz = px / size, py / size, pz / size
        lx, ly, lz = py * uz - pz * uy, pz * ux - px * uz, px * uy - py * ux
    lift = scale * speed
    ax += lift * (cy_vertical * px + cy_lateral * lx)
    ay += lift * (cy_vertical * py + cy_lateral * ly)
    az += lift * (cy_vertical * pz + cy_lateral * lz)
    return vx, vy, vz, ax, ay, az


def _advance(
    state: State,
    command: GuidanceCommand,
    dt: float,
    vehicle: VehicleParams,
    density_multiplier: float,
    t_next: float,
) -> State:
    """Classic RK4 over plain floats; the command is held for the whole step."""
    cy_vertical, cy_lateral = command.cy_vertical, command.cy_lateral

    def rate(y: tuple[float, ...]) -> tuple[float, ...]:
        return _stage_rate(y, cy_vertical, cy_lateral, vehicle, density_multiplier)

    y1 = rk4_step(rate, (*state.position.tolist(), *state.velocity.tolist()), dt)
    return State(
        t=t_next,
        position=y1[:3],
        velocity=y1[3:],
        phase=command.phase,
        alpha=vehicle.alpha_for(command),
    )


def step_rk4(
    state: State,
    command: GuidanceCommand,
    dt: float,
    vehicle: VehicleParams,
    density_multiplier: float,
) -> State:
    """Advance ``state`` by ``dt`` with ``command`` held constant.

    Raises:
        ContractError: If ``dt`` is not positive or the command exceeds CY_max.
        DomainError: If a stage lands below the atmosphere floor.
    """
    if not dt > 0.0:
        raise ContractError(f"dt must be positive, got {dt!r}")
    _check_command(command, vehicle)
    return _advance(state, command, dt, vehicle, density_multiplier, state.t + dt)


def _hermite(
    before: State, after: State, dt: float, s: float
) -> tuple[np.ndarray, np.ndarray]:
    """Cubic Hermite position and velocity at fraction ``s`` of a step."""
    s2, s3 = s * s, s * s * s
    h00 = 2.0 * s3 - 3.0 * s2 + 1.0
    h10 = s3 - 2.0 * s2 + s
    h01 = -2.0 * s3 + 3.0 * s2
    h11 = s3 - s2
    position = (
        h00 * before.position
        + h10 * dt * before.velocity
        + h01 * after.position
        + h11 * dt * after.velocity
    )
    d00 = 6.0 * s2 - 6.0 * s
    d10 = 3.0 * s2 - 4.0 * s + 1.0
    d01 = -6.0 * s2 + 6.0 * s
    d11 = 3.0 * s2 - 2.0 * s
    velocity = (
        (d00 * before.position + d01 * after.position) / dt
        + d10 * before.velocity
        + d11 * after.velocity
    )
    return position, velocity


def _refine_crossing(before: State, after: State, dt: float, radius: float) -> float:
    """Fraction of the step at which the interpolated path reaches ``radius``."""
    lo, hi = 0.0, 1.0
    while (hi - lo) * dt > EVENT_TIME_TOLERANCE:
        mid = 0.5 * (lo + hi)
        position, _ = _hermite(before, after, dt, mid)
        if _norm(position) > radius:
            lo = mid
        else:
            hi = mid
    return hi


def _closest_approach(
    before: State, after: State, dt: float, s_end: float, target: np.ndarray
) -> float:
    """Minimum distance from ``target`` to the interpolated path over ``[0, s_end]``.

    A coarse grid brackets the global minimum, then a bounded scalar
    minimization polishes it inside the bracket.
    """

    def distance(s: float) -> float:
        return _norm(_hermite(before, after, dt, s)[0] - target)

    grid = np.linspace(0.0, s_end, _MISS_GRID)
    values = [distance(float(s)) for s in grid]
    i = int(np.argmin(values))
    lo = float(grid[max(i - 1, 0)])
    hi = float(grid[min(i + 1, _MISS_GRID - 1)])
    if hi <= lo:
        return values[i]
    result = minimize_scalar(
        distance, bounds=(lo, hi), method="bounded", options={"xatol": _MISS_XATOL}
    )
    return min(values[i], float(result.fun))


def _sample(
    state: State, command: GuidanceCommand, vehicle: VehicleParams, density_multiplier: float
) -> TrajectorySample:
    air = atmosphere.sample(max(state.altitude, atmosphere.MIN_ALTITUDE))
    speed = state.speed
    q = 0.5 * air.density * density_multiplier * speed * speed
    aero = q * vehicle.ref_area / vehicle.mass * math.hypot(vehicle.cx0, command.magnitude)
    return TrajectorySample(
        state=state,
        command=command,
        mach=speed / air.speed_of_sound,
        dynamic_pressure=q,
        load_factor=aero / atmosphere.G0,
    )


def _miss(state: State, target: np.ndarray | None) -> float | None:
    if target is None:
        return None
    return _norm(state.position - target)


def propagate(
    initial: State,
    autopilot: Controller,
    vehicle: VehicleParams,
    environment: Environment,
    termination: TerminationSpec,
    dt: float = 0.02,
) -> Trajectory:
    """Integrate from ``initial`` until a stop condition fires.

    Each step asks the autopilot for a command, advances with RK4 and checks
    events. A crossing of the impact sphere is refined by bisection on the
    cubic Hermite interpolant of the final step. Timeouts and numerical
    failures end the run normally with the matching reason.

    Args:
        initial (State): Starting state.
        autopilot (Controller): Command source, called once per step.
        vehicle (VehicleParams): Vehicle model.
        environment (Environment): Density multiplier.
        termination (TerminationSpec): Stop conditions and aim point.
        dt (float): Integration step, s.

    Returns:
        Trajectory: Samples, termination record and phase transitions.
    """
    if not dt > 0.0:
        raise ContractError(f"dt must be positive, got {dt!r}")
    if not initial.is_finite():
        raise ContractError("initial state is not finite")

    multiplier = environment.density_multiplier
    target = termination.target_position
    impact_radius = (
        None if termination.target_altitude is None else R_EARTH + termination.target_altitude
    )

    def finish(reason: TerminationReason, state: State, miss: float | None) -> Trajectory:
        autopilot.finish(state)
        return Trajectory(
            initial=initial,
            samples=tuple(samples),
            termination=Termination(reason=reason, state=state, miss_distance=miss),
            transitions=tuple(autopilot.transitions),
            dt=dt,
        )

    samples: list[TrajectorySample] = []

    if impact_radius is not None and initial.radius <= impact_radius:
        final = initial.with_phase(PhaseId.DONE)
        return finish(TerminationReason.IMPACT, final, _miss(final, target))

    n_steps = (
        math.ceil((termination.t_max - initial.t) / dt - 1e-9)
        if termination.t_max is not None
        else None
    )
    step = 0
    state = initial
    while True:
        command = autopilot.command(state)
        _check_command(command, vehicle)
        samples.append(_sample(state, command, vehicle, multiplier))
        step += 1
        t_next = initial.t + step * dt

        try:
            after = _advance(state, command, dt, vehicle, multiplier, t_next)
        except DomainError as exc:
            logger.warning("Numerical failure at t=%.3f s: %s", state.t, exc)
            return finish(TerminationReason.NUMERICAL_FAILURE, state, _miss(state, target))
        if not after.is_finite() or after.radius < MIN_RADIUS:
            logger.warning("Numerical failure at t=%.3f s: corrupt state", t_next)
            return finish(TerminationReason.NUMERICAL_FAILURE, state, _miss(state, target))

        held = replace(command, phase=PhaseId.DONE)

        if impact_radius is not None and after.radius <= impact_radius:
            s_hit = _refine_crossing(state, after, dt, impact_radius)
            position, velocity = _hermite(state, after, dt, s_hit)
            final = State(
                t=state.t + s_hit * dt,
                position=position,
                velocity=velocity,
                phase=PhaseId.DONE,
                alpha=after.alpha,
            )
            miss = (
                None
                if target is None
                else _closest_approach(state, after, dt, s_hit, target)
            )
            samples.append(_sample(final, held, vehicle, multiplier))
            logger.debug("Impact at t=%.6f s, miss %s m", final.t, miss)
            return finish(TerminationReason.IMPACT, final, miss)

        final = after.with_phase(PhaseId.DONE)
        if termination.speed_floor is not None and after.speed < termination.speed_floor:
            samples.append(_sample(final, held, vehicle, multiplier))
            return finish(TerminationReason.SPEED_FLOOR, final, _miss(final, target))

        if n_steps is not None and step >= n_steps:
            samples.append(_sample(final, held, vehicle, multiplier))
            logger.warning("Run timed out at t=%.3f s, altitude %.1f m", final.t, final.altitude)
            return finish(TerminationReason.TIMEOUT, final, _miss(final, target))

        state = after


# ---------------------------------------------------------------------------
# Geometry and deorbit
# ---------------------------------------------------------------------------


def target_position(downrange: float, crossrange: float = 0.0, altitude: float = 0.0) -> np.ndarray:
    """Point on the sphere at arc distances from the canonical entry point.

    Downrange is measured along the reference ground track (+y), crossrange
    toward +z.
    """
    theta = downrange / R_EARTH
    phi = crossrange / R_EARTH
    radius = R_EARTH + altitude
    return radius * np.array(
        [math.cos(phi) * math.cos(theta), math.cos(phi) * math.sin(theta), math.sin(phi)]
    )


def ground_track(position: np.ndarray) -> tuple[float, float]:
    """Inverse of :func:`target_position`: (downrange, crossrange) arc lengths in m."""
    radius = _norm(position)
    downrange = R_EARTH * math.atan2(float(position[1]), float(position[0]))
    crossrange = R_EARTH * math.asin(max(-1.0, min(1.0, float(position[2]) / radius)))
    return downrange, crossrange


def circular_speed(radius: float) -> float:
    return math.sqrt(MU_EARTH / radius)


def minimum_deorbit_delta_v(orbit_altitude: float, target_altitude: float) -> float:
    """Smallest retrograde pulse whose perigee reaches ``target_altitude``."""
    r0 = R_EARTH + orbit_altitude
    rt = R_EARTH + target_altitude
    apoapsis_speed = math.sqrt(2.0 * MU_EARTH * rt / (r0 * (r0 + rt)))
    return circular_speed(r0) - apoapsis_speed


@dataclass(frozen=True)
class DeorbitSolution:
    """Two-body coast from a retrograde pulse to the entry interface.

    Both states share the canonical frame: the interface point lies on +x and
    the vehicle moves toward +y. ``pulse`` is stamped t=0 and ``interface``
    t=coast_time.
    """

    pulse: State
    interface: State
    coast_time: float
    perigee_altitude: float


def solve_deorbit(
    orbit_altitude: float, delta_v: float, coast_target_altitude: float
) -> DeorbitSolution:
    """Solve the vacuum coast after a retrograde pulse from a circular orbit.

    The pulse point is the apoapsis of the transfer ellipse; the interface is
    the first point where the descending branch reaches the target radius.

    Raises:
        DomainError: If the inputs are outside their valid ranges.
        DeorbitError: If the perigee stays above ``coast_target_altitude``.
    """
    if not MIN_ORBIT_ALTITUDE <= orbit_altitude <= MAX_ORBIT_ALTITUDE:
        raise DomainError(
            f"orbit altitude {orbit_altitude!r} m outside "
            f"[{MIN_ORBIT_ALTITUDE:.0f}, {MAX_ORBIT_ALTITUDE:.0f}] m"
        )
    if not coast_target_altitude < orbit_altitude:
        raise DomainError(
            f"coast target altitude {coast_target_altitude!r} m must be below "
            f"the orbit altitude {orbit_altitude!r} m"
        )
    r0 = R_EARTH + orbit_altitude
    v_circular = circular_speed(r0)
    if not 0.0 < delta_v < v_circular:
        raise DomainError(f"delta_v must be in (0, {v_circular:.1f}) m/s, got {delta_v!r}")

    rt = R_EARTH + coast_target_altitude
    v0 = v_circular - delta_v
    a = 1.0 / (2.0 / r0 - v0 * v0 / MU_EARTH)
    e = r0 / a - 1.0
    perigee = 2.0 * a - r0
    if perigee > rt + _PERIGEE_TOLERANCE:
        required = minimum_deorbit_delta_v(orbit_altitude, coast_target_altitude)
        raise DeorbitError(
            f"pulse of {delta_v:.3f} m/s leaves perigee at {perigee - R_EARTH:.0f} m, "
            f"above {coast_target_altitude:.0f} m; need at least {required:.3f} m/s",
            required_delta_v=required,
        )

    p = a * (1.0 - e * e)
    cos_nu = max(-1.0, min(1.0, (p / rt - 1.0) / e))
    nu = 2.0 * math.pi - math.acos(cos_nu)
    cos_e = max(-1.0, min(1.0, (e + cos_nu) / (1.0 + e * cos_nu)))
    ecc_anomaly = 2.0 * math.pi - math.acos(cos_e)
    mean_anomaly = ecc_anomaly - e * math.sin(ecc_anomaly)
    mean_motion = math.sqrt(MU_EARTH / a**3)
    coast_time = (mean_anomaly - math.pi) / mean_motion

    # perifocal frame rotated so the interface lands on +x
    c, s = math.cos(-nu), math.sin(-nu)

    def rotate(x: float, y: float) -> np.ndarray:
        return np.array([c * x - s * y, s * x + c * y, 0.0])

    k = math.sqrt(MU_EARTH / p)
    r_interface = p / (1.0 + e * cos_nu)
    sin_nu = math.sin(nu)
    interface = State(
        t=coast_time,
        position=rotate(r_interface * cos_nu, r_interface * sin_nu),
        velocity=rotate(-k * sin_nu, k * (e + cos_nu)),
    )
    pulse = State(
        t=0.0,
        position=rotate(-r0, 0.0),
        velocity=rotate(0.0, k * (e - 1.0)),
    )
    logger.info(
        "Deorbit %.1f m/s from %.0f m: coast %.1f s, interface speed %.1f m/s, fpa %.3f deg",
        delta_v,
        orbit_altitude,
        coast_time,
        interface.speed,
        math.degrees(interface.flight_path_angle),
    )
    return DeorbitSolution(
        pulse=pulse,
        interface=interface,
        coast_time=coast_time,
        perigee_altitude=perigee - R_EARTH,
    )


def apply_deorbit_pulse(
    orbit_altitude: float, delta_v: float, coast_target_altitude: float
) -> State:
    """Entry-interface state reached after a retrograde pulse. See :func:`solve_deorbit`."""
    return solve_deorbit(orbit_altitude, delta_v, coast_target_altitude).interface
