"""Pytest configuration and shared fixtures for reentrysim tests."""

import numpy as np
import pytest

from reentrysim.dynamics import Environment, TerminationSpec, VehicleParams
from reentrysim.guidance import GuidanceConfig
from reentrysim.scenario import load_scenario, parse_scenario
from reentrysim.seeker import SeekerConfig
from reentrysim.state import State

from fixtures import (
    NOMINAL_SCENARIO,
    nominal_document,
    scenario_text,
    short_document,
)


# ============================================================================
# Session-level fixtures (setup once for all tests)
# ============================================================================


@pytest.fixture(scope="session")
def nominal_scenario():
    """The shipped nominal scenario, parsed once.

    Returns:
        Scenario: Nominal entry with zero seeker noise.
    """
    return load_scenario(NOMINAL_SCENARIO)


@pytest.fixture(scope="session")
def short_scenario():
    """Short terminal-phase scenario used by campaign and CLI tests.

    Returns:
        Scenario: Level start at 31.5 km, 100 km short of the target.
    """
    return parse_scenario(scenario_text(short_document()))


@pytest.fixture(scope="session")
def vehicle():
    """Default vehicle (CY_max = 0.5)."""
    return VehicleParams()


@pytest.fixture(scope="session")
def guidance_config():
    return GuidanceConfig()


@pytest.fixture(scope="session")
def seeker_config():
    return SeekerConfig()


@pytest.fixture(scope="session")
def vacuum():
    """Environment with the atmosphere switched off."""
    return Environment(density_multiplier=0.0)


# ============================================================================
# Function-level fixtures (fresh for each test)
# ============================================================================


@pytest.fixture
def nominal_doc():
    """Mutable copy of the nominal scenario document.

    Returns:
        dict: Parsed JSON of ``scenarios/nominal.scenario``.
    """
    return nominal_document()


@pytest.fixture
def short_doc():
    return short_document()


@pytest.fixture
def rng():
    """Fresh, fixed-seed generator."""
    return np.random.default_rng(12345)


@pytest.fixture
def output_dir(tmp_path, monkeypatch):
    """Isolated output directory, also exported as ``REENTRYSIM_OUTPUT_DIR``.

    Yields:
        Path: Directory the CLI writes into when ``--out`` is omitted.
    """
    out = tmp_path / "results"
    monkeypatch.setenv("REENTRYSIM_OUTPUT_DIR", str(out))
    monkeypatch.chdir(tmp_path)
    yield out


# ============================================================================
# Helper fixtures
# ============================================================================


@pytest.fixture
def entry_state():
    """Factory fixture for states over the canonical entry point.

    Returns:
        callable: ``State.from_entry`` taking the flight path angle in degrees.
    """

    def make(altitude, speed, fpa_deg=0.0, heading_deg=0.0, **kwargs):
        return State.from_entry(
            altitude, speed, np.radians(fpa_deg), np.radians(heading_deg), **kwargs
        )

    return make


@pytest.fixture
def impact_only():
    """Termination on ground impact with a generous time limit."""
    return TerminationSpec(target_altitude=0.0, t_max=7200.0)
