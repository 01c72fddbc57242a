"""Scenario schema, parsing and the single-run driver.

A scenario file is a JSON object with a ``schema_version`` key and one level
of sections holding flat keys in SI units. Angles are written in degrees
under keys ending in ``_deg`` and converted to radians here::

    {
      "schema_version": 1,
      "name": "nominal",
      "vehicle": {"mass": 1500, "ref_area": 2, "cx0": 0.25, "k_over": 2},
      "entry": {"altitude": 100000, "speed": 7600, "flight_path_angle_deg": -12},
      "target": {"downrange": 700000, "crossrange": 1500}
    }

Exactly one of ``entry`` and ``deorbit`` must be present; ``target`` is
required; every other section is optional and falls back to defaults.
See ``docs/source/scenario_format.rst`` for the full key list.
"""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

import numpy as np
import orjson

from .dynamics import (
    Environment,
    TerminationSpec,
    Trajectory,
    VehicleParams,
    minimum_deorbit_delta_v,
    propagate,
    solve_deorbit,
    target_position,
)
from .errors import ConfigError, ScenarioError
from .guidance import Autopilot, GuidanceConfig
from .seeker import Seeker, SeekerConfig
from .state import State

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class EntryConditions:
    """Explicit entry-interface state over the canonical entry point."""

    altitude: float
    speed: float
    flight_path_angle: float
    heading: float = 0.0

    def __post_init__(self) -> None:
        if not self.altitude > 0.0:
            raise ConfigError("altitude", f"must be positive, got {self.altitude!r}")
        if not self.speed > 0.0:
            raise ConfigError("speed", f"must be positive, got {self.speed!r}")
        if not abs(self.flight_path_angle) < math.pi / 2:
            raise ConfigError(
                "flight_path_angle",
                f"must be within (-90, 90) degrees, got {self.flight_path_angle!r} rad",
            )
        if not math.isfinite(self.heading):
            raise ConfigError("heading", f"must be finite, got {self.heading!r}")


@dataclass(frozen=True)
class DeorbitConditions:
    orbit_altitude: float
    delta_v: float
    interface_altitude: float = 100_000.0

    def __post_init__(self) -> None:
        if not 150_000.0 <= self.orbit_altitude <= 500_000.0:
            raise ConfigError(
                "orbit_altitude", f"must be in [150000, 500000] m, got {self.orbit_altitude!r}"
            )
        if not self.delta_v > 0.0:
            raise ConfigError("delta_v", f"must be positive, got {self.delta_v!r}")
        if not 0.0 < self.interface_altitude < self.orbit_altitude:
            raise ConfigError(
                "interface_altitude",
                f"must be between 0 and the orbit altitude, got {self.interface_altitude!r}",
            )


@dataclass(frozen=True)
class TargetPlacement:
    """Target as arc lengths along and across the reference ground track, m."""

    downrange: float
    crossrange: float = 0.0

    def __post_init__(self) -> None:
        for name in ("downrange", "crossrange"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(name, "must be finite")

    def position(self) -> np.ndarray:
        return target_position(self.downrange, self.crossrange)


@dataclass(frozen=True)
class IntegrationConfig:
    """``t_max`` counts from the start of atmospheric flight."""

    dt: float = 0.02
    t_max: float = 3600.0
    speed_floor: float | None = None

    def __post_init__(self) -> None:
        if not (math.isfinite(self.dt) and self.dt > 0.0):
            raise ConfigError("dt", f"must be positive, got {self.dt!r}")
        if not self.t_max > 0.0:
            raise ConfigError("t_max", f"must be positive, got {self.t_max!r}")
        if self.speed_floor is not None and not self.speed_floor >= 0.0:
            raise ConfigError("speed_floor", f"must be non-negative, got {self.speed_floor!r}")


@dataclass(frozen=True)
class EntryDispersion:
    """Perturbation of the entry state applied by Monte Carlo sampling."""

    speed_scale: float = 1.0
    fpa_offset: float = 0.0


@dataclass(frozen=True)
class Scenario:
    target: TargetPlacement
    entry: EntryConditions | None = None
    deorbit: DeorbitConditions | None = None
    vehicle: VehicleParams = field(default_factory=VehicleParams)
    guidance: GuidanceConfig = field(default_factory=GuidanceConfig)
    seeker: SeekerConfig = field(default_factory=SeekerConfig)
    environment: Environment = field(default_factory=Environment)
    integration: IntegrationConfig = field(default_factory=IntegrationConfig)
    dispersion: EntryDispersion = field(default_factory=EntryDispersion)
    name: str = ""
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self) -> None:
        if (self.entry is None) == (self.deorbit is None):
            raise ConfigError("entry/deorbit", "exactly one of entry and deorbit is required")
        if self.guidance.planar and self.target.crossrange != 0.0:
            raise ConfigError("target.crossrange", "must be 0 when guidance.planar is set")
        if self.deorbit is not None:
            needed = minimum_deorbit_delta_v(
                self.deorbit.orbit_altitude, self.deorbit.interface_altitude
            )
            if self.deorbit.delta_v < needed - 1e-9:
                raise ConfigError(
                    "deorbit.delta_v",
                    f"{self.deorbit.delta_v} m/s never reaches the interface; "
                    f"need at least {needed:.3f} m/s",
                )


# ---------------------------------------------------------------------------
# Running
# ---------------------------------------------------------------------------


def initial_state(scenario: Scenario) -> State:
    """Entry-interface state with the scenario's entry dispersion applied.

    For deorbit scenarios the state is stamped with the coast time, so the
    trajectory time axis starts at the pulse.
    """
    dispersion = scenario.dispersion
    if scenario.entry is not None:
        entry = scenario.entry
        return State.from_entry(
            altitude=entry.altitude,
            speed=entry.speed * dispersion.speed_scale,
            flight_path_angle=entry.flight_path_angle + dispersion.fpa_offset,
            heading=entry.heading,
        )
    deorbit = scenario.deorbit
    interface = solve_deorbit(
        deorbit.orbit_altitude, deorbit.delta_v, deorbit.interface_altitude
    ).interface
    return State.from_entry(
        altitude=interface.altitude,
        speed=interface.speed * dispersion.speed_scale,
        flight_path_angle=interface.flight_path_angle + dispersion.fpa_offset,
        t=interface.t,
    )


def coast_time(scenario: Scenario) -> float | None:
    if scenario.deorbit is None:
        return None
    d = scenario.deorbit
    return solve_deorbit(d.orbit_altitude, d.delta_v, d.interface_altitude).coast_time


def simulate(
    scenario: Scenario,
    rng: np.random.Generator | None = None,
    dt: float | None = None,
) -> Trajectory:
    """Fly one scenario end to end.

    Args:
        scenario (Scenario): Validated scenario.
        rng (np.random.Generator | None): Seeker noise stream; seed 0 if omitted.
        dt (float | None): Overrides ``scenario.integration.dt``.

    Returns:
        Trajectory: The propagated run.
    """
    initial = initial_state(scenario)
    aim = scenario.target.position()
    seeker = Seeker(scenario.seeker, aim, rng if rng is not None else np.random.default_rng(0))
    autopilot = Autopilot(scenario.guidance, scenario.vehicle, seeker)
    integration = scenario.integration
    termination = TerminationSpec(
        target_altitude=0.0,
        t_max=initial.t + integration.t_max,
        speed_floor=integration.speed_floor,
        target_position=aim,
    )
    return propagate(
        initial,
        autopilot,
        scenario.vehicle,
        scenario.environment,
        termination,
        dt=integration.dt if dt is None else dt,
    )


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Key:
    attr: str
    kind: str = "number"  # number | optional-number | bool | band
    degrees: bool = False
    required: bool = False


_SECTIONS: dict[str, tuple[type, dict[str, _Key]]] = {
    "vehicle": (
        VehicleParams,
        {
            "mass": _Key("mass"),
            "ref_area": _Key("ref_area"),
            "cx0": _Key("cx0"),
            "k_over": _Key("k_over"),
            "cy_alpha": _Key("cy_alpha"),
        },
    ),
    "guidance": (
        GuidanceConfig,
        {
            "pullup_trigger_altitude": _Key("pullup_trigger_altitude"),
            "pullup_radius": _Key("pullup_radius"),
            "cruise_band": _Key("cruise_band", kind="band"),
            "cruise_reference": _Key("cruise_reference"),
            "cruise_gain_p": _Key("cruise_gain_p"),
            "cruise_gain_d": _Key("cruise_gain_d"),
            "pn_gain": _Key("pn_gain"),
            "entry_alpha_deg": _Key("entry_alpha", degrees=True),
            "lock_loss_hold": _Key("lock_loss_hold"),
            "planar": _Key("planar", kind="bool"),
        },
    ),
    "seeker": (
        SeekerConfig,
        {
            "detection_range": _Key("detection_range"),
            "fov_half_angle_deg": _Key("fov_half_angle", degrees=True),
            "los_noise_sigma": _Key("los_noise_sigma"),
            "lock_hysteresis": _Key("lock_hysteresis"),
        },
    ),
    "entry": (
        EntryConditions,
        {
            "altitude": _Key("altitude", required=True),
            "speed": _Key("speed", required=True),
            "flight_path_angle_deg": _Key("flight_path_angle", degrees=True, required=True),
            "heading_deg": _Key("heading", degrees=True),
        },
    ),
    "deorbit": (
        DeorbitConditions,
        {
            "orbit_altitude": _Key("orbit_altitude", required=True),
            "delta_v": _Key("delta_v", required=True),
            "interface_altitude": _Key("interface_altitude"),
        },
    ),
    "target": (
        TargetPlacement,
        {
            "downrange": _Key("downrange", required=True),
            "crossrange": _Key("crossrange"),
        },
    ),
    "environment": (Environment, {"density_multiplier": _Key("density_multiplier")}),
    "integration": (
        IntegrationConfig,
        {
            "dt": _Key("dt"),
            "t_max": _Key("t_max"),
            "speed_floor": _Key("speed_floor", kind="optional-number"),
        },
    ),
}

_TOP_LEVEL = {"schema_version", "name", *_SECTIONS}


class _Locator:
    """Maps dotted field paths back to line numbers in the source text."""

    def __init__(self, text: str):
        self.text = text

    def line(self, path: str) -> int | None:
        """Line of the last key in ``path``, matching keys only, never values."""
        offset = 0
        for part in path.split("."):
            found = re.compile(rf'"{re.escape(part)}"\s*:').search(self.text, offset)
            if found is None:
                return None
            offset = found.start()
        return self.text.count("\n", 0, offset) + 1

    def error(self, path: str, message: str) -> ScenarioError:
        return ScenarioError(message, field=path, line=self.line(path))


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _convert(value: Any, key: _Key, path: str, locator: _Locator) -> Any:
    if key.kind == "bool":
        if not isinstance(value, bool):
            raise locator.error(path, f"expected true or false, got {value!r}")
        return value
    if key.kind == "band":
        if not (isinstance(value, list) and len(value) == 2 and all(map(_is_number, value))):
            raise locator.error(path, f"expected [low, high] in metres, got {value!r}")
        return (float(value[0]), float(value[1]))
    if key.kind == "optional-number" and value is None:
        return None
    if not _is_number(value):
        raise locator.error(path, f"expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise locator.error(path, "must be finite")
    return math.radians(value) if key.degrees else value


def _build_section(name: str, raw: Any, locator: _Locator) -> Any:
    cls, keys = _SECTIONS[name]
    if not isinstance(raw, dict):
        raise locator.error(name, f"section {name!r} must be an object")
    for key in raw:
        if key not in keys:
            raise locator.error(f"{name}.{key}", f"unknown key {key!r} in section {name!r}")

    kwargs = {}
    for file_key, key in keys.items():
        path = f"{name}.{file_key}"
        if file_key not in raw:
            if key.required:
                raise locator.error(path, f"missing required key {file_key!r}")
            continue
        kwargs[key.attr] = _convert(raw[file_key], key, path, locator)

    try:
        return cls(**kwargs)
    except ConfigError as exc:
        file_key = next((k for k, spec in keys.items() if spec.attr == exc.field), exc.field)
        raise locator.error(f"{name}.{file_key}", exc.reason) from exc


def parse_scenario(text: str | bytes) -> Scenario:
    """Parse and fully validate a scenario document.

    Raises:
        ScenarioError: On malformed JSON, unknown or missing keys, wrong types
            or any invariant violation. No partial scenario is ever returned.
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ScenarioError(f"scenario is not valid UTF-8 (byte {exc.start})") from exc
    try:
        doc = orjson.loads(text)
    except orjson.JSONDecodeError as exc:
        raise ScenarioError(f"invalid JSON: {exc.msg} (column {exc.colno})", line=exc.lineno) from exc
    if not isinstance(doc, dict):
        raise ScenarioError("scenario must be a JSON object")

    locator = _Locator(text)
    for key in doc:
        if key not in _TOP_LEVEL:
            raise locator.error(key, f"unknown key {key!r}")

    version = doc.get("schema_version")
    if version is None:
        raise ScenarioError("missing required key 'schema_version'", field="schema_version")
    if isinstance(version, bool) or version != SCHEMA_VERSION:
        raise locator.error(
            "schema_version", f"unsupported schema_version {version!r}, expected {SCHEMA_VERSION}"
        )
    name = doc.get("name", "")
    if not isinstance(name, str):
        raise locator.error("name", f"expected a string, got {name!r}")

    if "entry" in doc and "deorbit" in doc:
        raise locator.error("deorbit", "entry and deorbit blocks are mutually exclusive")
    if "entry" not in doc and "deorbit" not in doc:
        raise ScenarioError("one of the entry or deorbit blocks is required", field="entry")
    if "target" not in doc:
        raise ScenarioError("missing required section 'target'", field="target")

    sections = {
        section: _build_section(section, doc[section], locator)
        for section in _SECTIONS
        if section in doc
    }
    try:
        scenario = Scenario(name=name, **sections)
    except ConfigError as exc:
        raise locator.error(exc.field, exc.reason) from exc
    logger.debug("Parsed scenario %r", scenario.name)
    return scenario


def load_scenario(path: str | Path) -> Scenario:
    """Read and parse a scenario file.

    Raises:
        ScenarioError: If the file cannot be read or does not validate.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except UnicodeDecodeError as exc:
        raise ScenarioError(f"{path} is not valid UTF-8 (byte {exc.start})") from exc
    scenario = parse_scenario(text)
    if not scenario.name:
        scenario = replace(scenario, name=path.stem)
    return scenario
