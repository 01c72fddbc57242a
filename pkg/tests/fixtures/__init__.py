"""Test fixtures and utilities for reentrysim tests."""

from .scenarios import (
    DELETE,
    DEORBIT_SCENARIO,
    GOLDEN_DIR,
    NOISY_SCENARIO,
    NOMINAL_SCENARIO,
    REPO_DIR,
    SCENARIO_DIR,
    SHORT_DOCUMENT,
    mutate,
    nominal_document,
    scenario_text,
    short_document,
    write_scenario,
)
from .synthetic import synthetic_runs, synthetic_trajectory

__all__ = [
    "DELETE",
    "DEORBIT_SCENARIO",
    "GOLDEN_DIR",
    "NOISY_SCENARIO",
    "NOMINAL_SCENARIO",
    "REPO_DIR",
    "SCENARIO_DIR",
    "SHORT_DOCUMENT",
    "mutate",
    "nominal_document",
    "scenario_text",
    "short_document",
    "synthetic_runs",
    "synthetic_trajectory",
    "write_scenario",
]
