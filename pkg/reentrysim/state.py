"""Value types shared by dynamics, guidance and the seeker.

Positions and velocities are float64 numpy 3-vectors in a planet-centered
inertial frame. The canonical frame puts the entry point on +x with the
reference ground track heading +y; crossrange is positive toward +z.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np

from .errors import ContractError

R_EARTH = 6_371_000.0  # m
MU_EARTH = 3.986004418e14  # m^3/s^2


class PhaseId(enum.IntEnum):
    """Guidance phase. Integer values are the phase column of trajectory files."""

    ENTRY = 1
    PULLUP = 2
    CRUISE = 3
    TERMINAL = 4
    DONE = 5

    @property
    def label(self) -> str:
        return self.name.lower()


@dataclass(frozen=True, eq=False)
class State:
    """Simulation state.

    Attributes:
        t (float): Seconds since scenario start.
        position (np.ndarray): Planet-centered position, m.
        velocity (np.ndarray): Inertial velocity, m/s.
        phase (PhaseId): Guidance phase active when the state was produced.
        alpha (float): Diagnostic angle of attack, rad.
    """

    t: float
    position: np.ndarray
    velocity: np.ndarray
    phase: PhaseId = PhaseId.ENTRY
    alpha: float = 0.0

    def __post_init__(self) -> None:
        position = np.asarray(self.position, dtype=np.float64)
        velocity = np.asarray(self.velocity, dtype=np.float64)
        if position.shape != (3,) or velocity.shape != (3,):
            raise ContractError("position and velocity must be 3-vectors")
        object.__setattr__(self, "position", position)
        object.__setattr__(self, "velocity", velocity)

    @cached_property
    def radius(self) -> float:
        return math.sqrt(float(np.dot(self.position, self.position)))

    @property
    def altitude(self) -> float:
        return self.radius - R_EARTH

    @cached_property
    def speed(self) -> float:
        return math.sqrt(float(np.dot(self.velocity, self.velocity)))

    @property
    def vertical_speed(self) -> float:
        return float(np.dot(self.position, self.velocity)) / self.radius

    @property
    def flight_path_angle(self) -> float:
        """Angle of the velocity above the local horizontal, rad."""
        speed = self.speed
        if speed == 0.0:
            return 0.0
        return math.asin(max(-1.0, min(1.0, self.vertical_speed / speed)))

    @property
    def specific_energy(self) -> float:
        return 0.5 * self.speed**2 - MU_EARTH / self.radius

    def is_finite(self) -> bool:
        return bool(np.isfinite(self.position).all() and np.isfinite(self.velocity).all())

    def with_phase(self, phase: PhaseId) -> State:
        return replace(self, phase=phase)

    @classmethod
    def from_entry(
        cls,
        altitude: float,
        speed: float,
        flight_path_angle: float,
        heading: float = 0.0,
        t: float = 0.0,
        phase: PhaseId = PhaseId.ENTRY,
    ) -> State:
        """Build a state over the canonical entry point.

        Args:
            altitude (float): Altitude above the reference sphere, m.
            speed (float): Inertial speed, m/s.
            flight_path_angle (float): Negative when descending, rad.
            heading (float): Angle from +y toward +z, rad.
            t (float): Time stamp, s.
            phase (PhaseId): Starting phase.
        """
        radius = R_EARTH + altitude
        horizontal = speed * math.cos(flight_path_angle)
        position = np.array([radius, 0.0, 0.0])
        velocity = np.array(
            [
                speed * math.sin(flight_path_angle),
                horizontal * math.cos(heading),
                horizontal * math.sin(heading),
            ]
        )
        return cls(t=t, position=position, velocity=velocity, phase=phase)


@dataclass(frozen=True, slots=True)
class GuidanceCommand:
    """Two-channel lift coefficient command held over one integration step.

    ``cy_vertical`` is positive for lift up in the plane of position and
    velocity; ``cy_lateral`` acts horizontally, perpendicular to velocity,
    positive toward ``position x velocity``.
    """

    cy_vertical: float = 0.0
    cy_lateral: float = 0.0
    phase: PhaseId = PhaseId.ENTRY
    saturated: bool = False
    holding: bool = False  # lock lost; last terminal command held or dropped

    @property
    def magnitude(self) -> float:
        return math.hypot(self.cy_vertical, self.cy_lateral)


@dataclass(frozen=True, slots=True)
class Derivative:
    d_position: np.ndarray
    d_velocity: np.ndarray


@dataclass(frozen=True, slots=True)
class PhaseTransition:
    """One forward step of the phase state machine."""

    t: float
    from_phase: PhaseId
    to_phase: PhaseId
    altitude: float
    speed: float
    flight_path_angle: float

    @classmethod
    def at(cls, state: State, from_phase: PhaseId, to_phase: PhaseId) -> PhaseTransition:
        return cls(
            t=state.t,
            from_phase=from_phase,
            to_phase=to_phase,
            altitude=state.altitude,
            speed=state.speed,
            flight_path_angle=state.flight_path_angle,
        )
