import logging

from .atmosphere import AtmosphereSample
from .dynamics import (
    Environment,
    TerminationReason,
    TerminationSpec,
    Trajectory,
    VehicleParams,
    apply_deorbit_pulse,
    propagate,
)
from .errors import (
    ConfigError,
    ContractError,
    DeorbitError,
    DomainError,
    ReentrySimError,
    ScenarioError,
)
from .guidance import Autopilot, GuidanceConfig
from .montecarlo import CampaignReport, DispersionSpec, run_batch
from .pool import CampaignPool
from .scenario import Scenario, load_scenario, parse_scenario, simulate
from .seeker import Seeker, SeekerConfig, SeekerStatus
from .state import GuidanceCommand, PhaseId, State

__version__ = "1.0.0"

__all__ = [
    "AtmosphereSample",
    "Autopilot",
    "CampaignPool",
    "CampaignReport",
    "ConfigError",
    "ContractError",
    "DeorbitError",
    "DispersionSpec",
    "DomainError",
    "Environment",
    "GuidanceCommand",
    "GuidanceConfig",
    "PhaseId",
    "ReentrySimError",
    "Scenario",
    "ScenarioError",
    "Seeker",
    "SeekerConfig",
    "SeekerStatus",
    "State",
    "TerminationReason",
    "TerminationSpec",
    "Trajectory",
    "VehicleParams",
    "apply_deorbit_pulse",
    "load_scenario",
    "parse_scenario",
    "propagate",
    "run_batch",
    "simulate",
]

# Configure default logging (users can override)
logging.getLogger(__name__).addHandler(logging.NullHandler())
