"""Geometric infrared seeker.

Detection is a range gate plus a cone around the velocity vector. Lock is
acquired after ``lock_hysteresis`` seconds of continuous detection and
dropped after the same time of continuous non-detection; the timers travel
in :class:`SeekerStatus`, which the caller threads from one call to the next.
The measured line-of-sight rate is the true rate plus Gaussian noise on the
two axes perpendicular to the line of sight.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .state import State

logger = logging.getLogger(__name__)

_TIME_EPS = 1e-9


@dataclass(frozen=True)
class SeekerConfig:
    """Seeker parameters. The boresight is always along the velocity."""

    detection_range: float = 120_000.0
    fov_half_angle: float = math.radians(30.0)
    los_noise_sigma: float = 0.5e-3
    lock_hysteresis: float = 0.5

    def __post_init__(self) -> None:
        if not self.detection_range > 0.0:
            raise ConfigError("detection_range", f"must be positive, got {self.detection_range!r}")
        if not 0.0 < self.fov_half_angle < math.pi / 2:
            raise ConfigError(
                "fov_half_angle", f"must be in (0, 90) degrees, got {self.fov_half_angle!r} rad"
            )
        if not self.los_noise_sigma >= 0.0:
            raise ConfigError("los_noise_sigma", f"must be >= 0, got {self.los_noise_sigma!r}")
        if not self.lock_hysteresis >= 0.0:
            raise ConfigError("lock_hysteresis", f"must be >= 0, got {self.lock_hysteresis!r}")


@dataclass(frozen=True, eq=False)
class SeekerStatus:
    """One seeker output.

    Detection edges are timed by interpolating the view margin between the
    two calls that straddle them, so lock events land at the same instant
    whatever the call spacing.

    Attributes:
        t (float): Time of the measurement, s.
        locked (bool): Track established.
        detected (bool): Target inside range gate and field of view this call.
        los_unit (np.ndarray | None): Measured line-of-sight unit vector; set while tracking.
        los_rate (np.ndarray | None): Measured LOS angular rate, rad/s, perpendicular to ``los_unit``.
        closing_speed (float | None): Truth closing speed, m/s; only while locked.
        margin (float): View margin of this call, see :func:`view_margin`.
        changed_at (float): When the detection flag last flipped, s.
        lock_event_at (float): When lock was last acquired or dropped, s.
    """

    t: float
    locked: bool = False
    detected: bool = False
    los_unit: np.ndarray | None = None
    los_rate: np.ndarray | None = None
    closing_speed: float | None = None
    margin: float = -math.inf
    changed_at: float = 0.0
    lock_event_at: float = 0.0

    @property
    def streak(self) -> float:
        """Seconds the detection flag has held its current value."""
        return self.t - self.changed_at

    @property
    def time_since_lock_event(self) -> float:
        return self.t - self.lock_event_at


def _perpendicular_axes(unit: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    trial = np.array([0.0, 0.0, 1.0]) if abs(unit[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
    e1 = trial - float(np.dot(trial, unit)) * unit
    e1 /= np.linalg.norm(e1)
    return e1, np.cross(unit, e1)


def los_geometry(state: State, target: np.ndarray) -> tuple[np.ndarray, float, np.ndarray, float]:
    """Truth line-of-sight quantities.

    Returns:
        tuple: (los_unit, range, los_rate, closing_speed), with
        ``los_rate = (r x v_rel) / |r|^2`` for ``r = target - position``
        and ``v_rel = -velocity``.
    """
    r = target - state.position
    distance = float(np.linalg.norm(r))
    unit = r / distance
    v_rel = -state.velocity
    rate = np.cross(r, v_rel) / (distance * distance)
    closing = -float(np.dot(v_rel, unit))
    return unit, distance, rate, closing


def view_margin(state: State, target: np.ndarray, config: SeekerConfig) -> float:
    """Signed distance to the edge of the detection volume.

    The smaller of the relative range margin and the cone margin
    ``cos(off_boresight) - cos(fov_half_angle)``; non-negative exactly when
    the target is in view, ``-inf`` for degenerate geometry.
    """
    r = target - state.position
    distance = float(np.linalg.norm(r))
    speed = state.speed
    if distance == 0.0 or speed == 0.0:
        return -math.inf
    range_margin = (config.detection_range - distance) / config.detection_range
    cos_off = float(np.dot(r, state.velocity)) / (distance * speed)
    return min(range_margin, cos_off - math.cos(config.fov_half_angle))


def in_view(state: State, target: np.ndarray, config: SeekerConfig) -> bool:
    return view_margin(state, target, config) >= 0.0


def _edge_time(previous: SeekerStatus, t: float, margin: float) -> float:
    """Interpolated instant the margin crossed zero inside ``(previous.t, t]``."""
    m0 = previous.margin
    if not (math.isfinite(m0) and math.isfinite(margin)) or m0 == margin:
        return t
    fraction = m0 / (m0 - margin)
    return previous.t + min(1.0, max(0.0, fraction)) * (t - previous.t)


def sense(
    state: State,
    target_position: np.ndarray,
    config: SeekerConfig,
    rng: np.random.Generator,
    previous: SeekerStatus | None = None,
) -> SeekerStatus:
    """Measure the target and update the lock state.

    Noise is drawn from ``rng`` only while the target is tracked, two normal
    draws per call.
    """
    margin = view_margin(state, target_position, config)
    detected = margin >= 0.0
    if previous is None:
        locked, changed_at, lock_event_at = False, state.t, state.t
    else:
        locked = previous.locked
        lock_event_at = previous.lock_event_at
        if detected == previous.detected:
            changed_at = previous.changed_at
        else:
            changed_at = _edge_time(previous, state.t, margin)

    # the event instant is edge + hysteresis, never later than this call
    due = changed_at + config.lock_hysteresis
    if locked != detected and state.t >= due - _TIME_EPS:
        locked, lock_event_at = detected, min(due, state.t)

    if not (locked or detected):
        return SeekerStatus(
            t=state.t,
            locked=False,
            detected=False,
            margin=margin,
            changed_at=changed_at,
            lock_event_at=lock_event_at,
        )

    unit, _, rate, closing = los_geometry(state, target_position)
    if config.los_noise_sigma > 0.0:
        e1, e2 = _perpendicular_axes(unit)
        n1, n2 = rng.normal(0.0, config.los_noise_sigma, size=2)
        rate = rate + n1 * e1 + n2 * e2
    return SeekerStatus(
        t=state.t,
        locked=locked,
        detected=detected,
        los_unit=unit,
        los_rate=rate,
        closing_speed=closing if locked else None,
        margin=margin,
        changed_at=changed_at,
        lock_event_at=lock_event_at,
    )


class Seeker:
    """Seeker handle owned by one autopilot: carries the status between calls.

    Args:
        config (SeekerConfig): Seeker parameters.
        target_position (np.ndarray): Fixed aim point.
        rng (np.random.Generator): Noise stream; owned by the caller's run.
    """

    def __init__(
        self,
        config: SeekerConfig,
        target_position: np.ndarray,
        rng: np.random.Generator | None = None,
    ):
        self.config = config
        self.target_position = np.asarray(target_position, dtype=np.float64)
        self.rng = rng if rng is not None else np.random.default_rng(0)
        self.status: SeekerStatus | None = None

    def sense(self, state: State) -> SeekerStatus:
        was_locked = self.status is not None and self.status.locked
        self.status = sense(state, self.target_position, self.config, self.rng, self.status)
        if self.status.locked and not was_locked:
            logger.info("Seeker lock acquired at t=%.2f s", state.t)
        elif was_locked and not self.status.locked:
            logger.warning("Seeker lock lost at t=%.2f s", state.t)
        return self.status
