"""Typed exception hierarchy.

One contract: every failure raised by the library is a subclass of
:class:`ReentrySimError`. Run outcomes (impact, timeout, numerical failure)
are data on the trajectory, not exceptions.
"""

from __future__ import annotations


class ReentrySimError(Exception):
    """Base class for all reentrysim errors."""


class DomainError(ReentrySimError, ValueError):
    """A numeric input lies outside the domain of a model or statistic."""


class ContractError(ReentrySimError, ValueError):
    """A precondition or value-type invariant was violated."""


class ConfigError(ContractError):
    """A configuration value violates its invariant.

    ``field`` names the offending attribute so the scenario parser can report
    it with its section prefix.
    """

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.reason = message


class DeorbitError(DomainError):
    """The deorbit pulse cannot bring the vehicle down to the interface."""

    def __init__(self, message: str, required_delta_v: float):
        super().__init__(message)
        self.required_delta_v = required_delta_v


class ScenarioError(ReentrySimError):
    """A scenario file could not be turned into a valid :class:`Scenario`."""

    def __init__(self, message: str, field: str = "", line: int | None = None):
        location = []
        if field:
            location.append(field)
        if line is not None:
            location.append(f"line {line}")
        prefix = f"{', '.join(location)}: " if location else ""
        super().__init__(prefix + message)
        self.field = field
        self.line = line
        self.reason = message


class UsageError(ReentrySimError):
    """The command line was malformed."""
