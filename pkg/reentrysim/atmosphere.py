"""Standard atmosphere and speed of sound.

US Standard Atmosphere 1976 geopotential layers from sea level to 86 km
geometric altitude; above that, density decays exponentially with a fixed
scale height at the frozen 86 km temperature. Density is always derived from
the ideal gas law, so ``p == rho * R_AIR * T`` holds at every altitude.

All functions are pure and thread-safe.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass

from .errors import DomainError

GAMMA_AIR = 1.4
R_AIR = 287.053  # J/(kg K)
G0 = 9.80665  # m/s^2
EARTH_RADIUS_GEOPOTENTIAL = 6_356_766.0  # m

MIN_ALTITUDE = -500.0
MAX_ALTITUDE = 150_000.0
UPPER_BASE_ALTITUDE = 86_000.0
SCALE_HEIGHT = 7_500.0

SEA_LEVEL_TEMPERATURE = 288.15
SEA_LEVEL_PRESSURE = 101_325.0

# (base geopotential height m', lapse rate K/m')
_LAPSE_RATES = (
    (0.0, -0.0065),
    (11_000.0, 0.0),
    (20_000.0, 0.001),
    (32_000.0, 0.0028),
    (47_000.0, 0.0),
    (51_000.0, -0.0028),
    (71_000.0, -0.002),
)


@dataclass(frozen=True, slots=True)
class AtmosphereSample:
    """Atmospheric state at one altitude (SI units)."""

    temperature: float
    pressure: float
    density: float
    speed_of_sound: float


def _layer_state(
    base_temperature: float, base_pressure: float, lapse: float, dh: float
) -> tuple[float, float]:
    if lapse == 0.0:
        return base_temperature, base_pressure * math.exp(
            -G0 * dh / (R_AIR * base_temperature)
        )
    temperature = base_temperature + lapse * dh
    exponent = G0 / (R_AIR * lapse)
    return temperature, base_pressure * (base_temperature / temperature) ** exponent


def _build_layers() -> tuple[tuple[float, float, float, float], ...]:
    """Chain the layer base values up from sea level so boundaries are exact."""
    layers = []
    temperature, pressure = SEA_LEVEL_TEMPERATURE, SEA_LEVEL_PRESSURE
    for i, (base, lapse) in enumerate(_LAPSE_RATES):
        layers.append((base, lapse, temperature, pressure))
        if i + 1 < len(_LAPSE_RATES):
            top = _LAPSE_RATES[i + 1][0]
            temperature, pressure = _layer_state(temperature, pressure, lapse, top - base)
    return tuple(layers)


_LAYERS = _build_layers()
_LAYER_BASES = tuple(layer[0] for layer in _LAYERS)


def geopotential_altitude(altitude: float) -> float:
    """Convert geometric altitude (m) to geopotential altitude (m')."""
    return EARTH_RADIUS_GEOPOTENTIAL * altitude / (EARTH_RADIUS_GEOPOTENTIAL + altitude)


def geometric_altitude(geopotential: float) -> float:
    """Convert geopotential altitude (m') to geometric altitude (m)."""
    return (
        EARTH_RADIUS_GEOPOTENTIAL * geopotential / (EARTH_RADIUS_GEOPOTENTIAL - geopotential)
    )


def _standard_layers(altitude: float) -> tuple[float, float]:
    h = geopotential_altitude(altitude)
    i = max(bisect_right(_LAYER_BASES, h) - 1, 0)
    base, lapse, base_temperature, base_pressure = _LAYERS[i]
    return _layer_state(base_temperature, base_pressure, lapse, h - base)


_UPPER_TEMPERATURE, _UPPER_PRESSURE = _standard_layers(UPPER_BASE_ALTITUDE)
_UPPER_DENSITY = _UPPER_PRESSURE / (R_AIR * _UPPER_TEMPERATURE)


def speed_of_sound(temperature: float) -> float:
    """Speed of sound ``sqrt(gamma * R_air * T)`` in m/s.

    Raises:
        DomainError: If ``temperature`` is not strictly positive.
    """
    if not temperature > 0.0:
        raise DomainError(f"temperature must be positive, got {temperature!r} K")
    return math.sqrt(GAMMA_AIR * R_AIR * temperature)


def sample(altitude: float) -> AtmosphereSample:
    """Sample the atmosphere at a geometric altitude above the reference sphere.

    Altitudes above 150 km return the 150 km values.

    Args:
        altitude (float): Geometric altitude in metres, at least -500 m.

    Returns:
        AtmosphereSample: Temperature, pressure, density and speed of sound.

    Raises:
        DomainError: If ``altitude`` is below -500 m (or NaN).
    """
    if not altitude >= MIN_ALTITUDE:
        raise DomainError(
            f"altitude {altitude!r} m is below the model floor of {MIN_ALTITUDE} m"
        )
    altitude = min(altitude, MAX_ALTITUDE)

    if altitude <= UPPER_BASE_ALTITUDE:
        temperature, pressure = _standard_layers(altitude)
        density = pressure / (R_AIR * temperature)
    else:
        temperature = _UPPER_TEMPERATURE
        density = _UPPER_DENSITY * math.exp(-(altitude - UPPER_BASE_ALTITUDE) / SCALE_HEIGHT)
        pressure = density * R_AIR * temperature

    return AtmosphereSample(
        temperature=temperature,
        pressure=pressure,
        density=density,
        speed_of_sound=speed_of_sound(temperature),
    )


def density(altitude: float) -> float:
    """Density alone, kg/m^3; the integrator's per-stage lookup.

    Raises:
        DomainError: If ``altitude`` is below -500 m (or NaN).
    """
    if not altitude >= MIN_ALTITUDE:
        raise DomainError(
            f"altitude {altitude!r} m is below the model floor of {MIN_ALTITUDE} m"
        )
    if altitude > UPPER_BASE_ALTITUDE:
        altitude = min(altitude, MAX_ALTITUDE)
        return _UPPER_DENSITY * math.exp(-(altitude - UPPER_BASE_ALTITUDE) / SCALE_HEIGHT)
    temperature, pressure = _standard_layers(altitude)
    return pressure / (R_AIR * temperature)


def mach(speed: float, altitude: float) -> float:
    """Mach number of ``speed`` (m/s) at ``altitude`` (m).

    Raises:
        DomainError: If ``speed`` is negative or the altitude is out of range.
    """
    if not speed >= 0.0:
        raise DomainError(f"speed must be non-negative, got {speed!r} m/s")
    return speed / sample(altitude).speed_of_sound
