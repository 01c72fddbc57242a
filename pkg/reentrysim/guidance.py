"""Phase state machine and per-phase lift laws.

Every law computes a demanded acceleration perpendicular to the velocity
and converts it to lift coefficients with the nominal dynamic pressure,
then saturates the vector to ``CY_max`` keeping its direction.

Phases only move forward: entry, pull-up, cruise, terminal, done.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

import numpy as np

from . import atmosphere
from .dynamics import VehicleParams, lift_basis
from .errors import ConfigError, ContractError
from .seeker import Seeker, SeekerStatus
from .state import MU_EARTH, GuidanceCommand, PhaseId, PhaseTransition, State

logger = logging.getLogger(__name__)

_TIME_EPS = 1e-9


@dataclass(frozen=True)
class GuidanceConfig:
    """Guidance constants.

    The cruise gains act on altitude error (m) and vertical speed (m/s) and
    produce an acceleration (m/s^2); the defaults give a natural frequency of
    0.1 rad/s with damping 0.8.
    """

    pullup_trigger_altitude: float = 85_000.0
    pullup_radius: float = 45_000.0
    cruise_band: tuple[float, float] = (30_000.0, 33_000.0)
    cruise_reference: float = 31_500.0
    cruise_gain_p: float = 0.01
    cruise_gain_d: float = 0.16
    pn_gain: float = 4.0
    entry_alpha: float = math.radians(3.0)
    lock_loss_hold: float = 0.5
    planar: bool = False

    def __post_init__(self) -> None:
        band = tuple(float(x) for x in self.cruise_band)
        if len(band) != 2:
            raise ConfigError("cruise_band", "must hold exactly two altitudes")
        object.__setattr__(self, "cruise_band", band)
        low, high = band
        if not 0.0 < low < high < self.pullup_trigger_altitude:
            raise ConfigError(
                "cruise_band",
                f"need 0 < low < high < pullup_trigger_altitude, got [{low}, {high}] "
                f"with trigger {self.pullup_trigger_altitude}",
            )
        if not low <= self.cruise_reference <= high:
            raise ConfigError(
                "cruise_reference", f"{self.cruise_reference} lies outside [{low}, {high}]"
            )
        if not self.pullup_radius > 0.0:
            raise ConfigError("pullup_radius", f"must be positive, got {self.pullup_radius!r}")
        if not 2.0 <= self.pn_gain <= 6.0:
            raise ConfigError("pn_gain", f"must be in [2, 6], got {self.pn_gain!r}")
        for name in ("cruise_gain_p", "cruise_gain_d", "lock_loss_hold"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0.0):
                raise ConfigError(name, f"must be non-negative, got {value!r}")
        if not math.isfinite(self.entry_alpha):
            raise ConfigError("entry_alpha", f"must be finite, got {self.entry_alpha!r}")


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def saturate(cy_vertical: float, cy_lateral: float, cy_max: float) -> tuple[float, float, bool]:
    """Scale a two-channel command onto the ``cy_max`` circle if it lies outside.

    Returns:
        tuple: (cy_vertical, cy_lateral, saturated)
    """
    size = math.hypot(cy_vertical, cy_lateral)
    if size <= cy_max:
        return cy_vertical, cy_lateral, False
    scale = cy_max / size
    vertical, lateral = cy_vertical * scale, cy_lateral * scale
    while math.hypot(vertical, lateral) > cy_max:
        vertical, lateral = vertical * (1.0 - 1e-15), lateral * (1.0 - 1e-15)
    return vertical, lateral, True


def local_gravity(state: State) -> float:
    return MU_EARTH / state.radius**2


def dynamic_pressure(state: State) -> float:
    """Dynamic pressure from the nominal atmosphere, Pa."""
    rho = atmosphere.density(max(state.altitude, atmosphere.MIN_ALTITUDE))
    return 0.5 * rho * state.speed**2


def _lift_command(
    a_vertical: float,
    a_lateral: float,
    state: State,
    config: GuidanceConfig,
    vehicle: VehicleParams,
    phase: PhaseId,
) -> GuidanceCommand:
    if config.planar:
        a_lateral = 0.0
    q = dynamic_pressure(state)
    if q > 0.0:
        scale = vehicle.mass / (q * vehicle.ref_area)
        cy_vertical, cy_lateral = a_vertical * scale, a_lateral * scale
    else:
        size = math.hypot(a_vertical, a_lateral)
        if size == 0.0:
            cy_vertical = cy_lateral = 0.0
        else:
            cy_vertical = vehicle.cy_max * a_vertical / size
            cy_lateral = vehicle.cy_max * a_lateral / size
    cy_vertical, cy_lateral, saturated = saturate(cy_vertical, cy_lateral, vehicle.cy_max)
    return GuidanceCommand(
        cy_vertical=cy_vertical, cy_lateral=cy_lateral, phase=phase, saturated=saturated
    )


# ---------------------------------------------------------------------------
# Phase laws
# ---------------------------------------------------------------------------


def command_entry(state: State, config: GuidanceConfig, vehicle: VehicleParams) -> GuidanceCommand:
    """Constant trim lift during the gravitational entry."""
    cy, _, saturated = saturate(config.entry_alpha * vehicle.cy_alpha, 0.0, vehicle.cy_max)
    return GuidanceCommand(cy_vertical=cy, phase=PhaseId.ENTRY, saturated=saturated)


def pullup_normal_acceleration(
    speed: float, flight_path_angle: float, radius: float, gravity: float
) -> float:
    """Lift acceleration for a vertical arc of ``radius``: ``V^2/R - g cos(gamma)``."""
    return speed * speed / radius - gravity * math.cos(flight_path_angle)


def command_pullup(state: State, config: GuidanceConfig, vehicle: VehicleParams) -> GuidanceCommand:
    a_n = pullup_normal_acceleration(
        state.speed, state.flight_path_angle, config.pullup_radius, local_gravity(state)
    )
    return _lift_command(a_n, 0.0, state, config, vehicle, PhaseId.PULLUP)


def cruise_pd_acceleration(altitude: float, vertical_speed: float, config: GuidanceConfig) -> float:
    return (
        -config.cruise_gain_p * (altitude - config.cruise_reference)
        - config.cruise_gain_d * vertical_speed
    )


def cruise_balance_acceleration(state: State) -> float:
    """Lift acceleration that holds altitude: gravity less centrifugal relief."""
    vertical = state.vertical_speed
    horizontal_sq = max(state.speed**2 - vertical * vertical, 0.0)
    return local_gravity(state) - horizontal_sq / state.radius


def command_cruise(state: State, config: GuidanceConfig, vehicle: VehicleParams) -> GuidanceCommand:
    """Altitude hold: gravity balance plus PD on altitude error, no lateral lift."""
    a = cruise_balance_acceleration(state) + cruise_pd_acceleration(
        state.altitude, state.vertical_speed, config
    )
    return _lift_command(a, 0.0, state, config, vehicle, PhaseId.CRUISE)


def pn_acceleration(
    velocity: np.ndarray, status: SeekerStatus, config: GuidanceConfig
) -> np.ndarray:
    """Proportional navigation ``N * Vc * (los_rate x los_unit)``, perpendicular to velocity."""
    if not status.locked or status.los_rate is None or status.closing_speed is None:
        raise ContractError("proportional navigation needs a locked seeker")
    a = config.pn_gain * status.closing_speed * np.cross(status.los_rate, status.los_unit)
    v_hat = velocity / np.linalg.norm(velocity)
    return a - float(np.dot(a, v_hat)) * v_hat


def command_terminal(
    state: State, status: SeekerStatus, config: GuidanceConfig, vehicle: VehicleParams
) -> GuidanceCommand:
    a = pn_acceleration(state.velocity, status, config)
    up, lateral = lift_basis(state.position, state.velocity)
    a_vertical = float(np.dot(a, up)) + local_gravity(state) * math.cos(state.flight_path_angle)
    a_lateral = float(np.dot(a, lateral))
    return _lift_command(a_vertical, a_lateral, state, config, vehicle, PhaseId.TERMINAL)


# ---------------------------------------------------------------------------
# State machine
# ---------------------------------------------------------------------------


class Autopilot:
    """The automatic control loop of one run.

    Emits one :class:`GuidanceCommand` per dynamics step and keeps the
    forward-only phase log. Not thread-safe; each propagation owns its own.

    Args:
        config (GuidanceConfig): Guidance constants.
        vehicle (VehicleParams): Used to turn accelerations into lift coefficients.
        seeker (Seeker | None): Seeker handle sensed once per :meth:`command`.
        phase (PhaseId): Starting phase.
    """

    def __init__(
        self,
        config: GuidanceConfig,
        vehicle: VehicleParams,
        seeker: Seeker | None = None,
        phase: PhaseId = PhaseId.ENTRY,
    ):
        self.config = config
        self.vehicle = vehicle
        self.seeker = seeker
        self.phase = phase
        self.transitions: list[PhaseTransition] = []
        self.last_command: GuidanceCommand | None = None
        self._last_pn: GuidanceCommand | None = None
        self._lock_lost_at: float | None = None

    def command(self, state: State) -> GuidanceCommand:
        """Sense, then :meth:`update`."""
        status = self.seeker.sense(state) if self.seeker is not None else None
        return self.update(state, status)

    def update(self, state: State, seeker_status: SeekerStatus | None = None) -> GuidanceCommand:
        phase = self.update_phase(state, seeker_status)
        if phase is PhaseId.ENTRY:
            command = command_entry(state, self.config, self.vehicle)
        elif phase is PhaseId.PULLUP:
            command = command_pullup(state, self.config, self.vehicle)
        elif phase is PhaseId.CRUISE:
            command = command_cruise(state, self.config, self.vehicle)
        elif phase is PhaseId.TERMINAL:
            command = self._terminal(state, seeker_status)
        else:
            command = GuidanceCommand(phase=PhaseId.DONE)

        if command.saturated:
            logger.debug("Saturated %s command at t=%.2f s", phase.label, state.t)
        self.last_command = command
        return command

    def update_phase(self, state: State, seeker_status: SeekerStatus | None = None) -> PhaseId:
        """Apply at most one forward transition and return the current phase."""
        phase = self.phase
        if phase is PhaseId.ENTRY and state.altitude <= self.config.pullup_trigger_altitude:
            self._transition(state, PhaseId.PULLUP)
        elif phase is PhaseId.PULLUP and (
            state.flight_path_angle >= 0.0 or state.altitude <= self.config.cruise_band[1]
        ):
            self._transition(state, PhaseId.CRUISE)
        elif phase is PhaseId.CRUISE and seeker_status is not None and seeker_status.locked:
            self._transition(state, PhaseId.TERMINAL)
        return self.phase

    def finish(self, state: State) -> None:
        if self.phase is not PhaseId.DONE:
            self._transition(state, PhaseId.DONE)

    def _transition(self, state: State, to_phase: PhaseId) -> None:
        if to_phase <= self.phase:
            raise ContractError(f"phase cannot move from {self.phase.name} to {to_phase.name}")
        self.transitions.append(PhaseTransition.at(state, self.phase, to_phase))
        logger.info(
            "Phase %s -> %s at t=%.2f s, altitude %.0f m, speed %.0f m/s",
            self.phase.label,
            to_phase.label,
            state.t,
            state.altitude,
            state.speed,
        )
        self.phase = to_phase

    def _terminal(self, state: State, status: SeekerStatus | None) -> GuidanceCommand:
        if status is not None and status.locked:
            self._lock_lost_at = None
            self._last_pn = command_terminal(state, status, self.config, self.vehicle)
            return self._last_pn

        if self._lock_lost_at is None:
            self._lock_lost_at = (
                min(status.lock_event_at, state.t) if status is not None else state.t
            )
            logger.warning("Terminal guidance without lock at t=%.2f s", state.t)
        held_for = state.t - self._lock_lost_at
        if self._last_pn is not None and held_for < self.config.lock_loss_hold - _TIME_EPS:
            return replace(self._last_pn, holding=True)
        return GuidanceCommand(phase=PhaseId.TERMINAL, holding=True)
