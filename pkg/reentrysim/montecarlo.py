"""Dispersion campaigns and miss-distance statistics.

Every run draws from its own random streams derived from
``(master_seed, run_index)``, never from a shared stream, so a campaign's
report does not depend on how runs are scheduled across workers.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass, field, replace

import numpy as np
import tqdm

from .dynamics import Environment, ground_track
from .errors import ConfigError, ContractError, DomainError
from .pool import CampaignPool, default_workers
from .scenario import EntryDispersion, Scenario, TargetPlacement, simulate

logger = logging.getLogger(__name__)

SUCCESS_REASON = "impact"


@dataclass(frozen=True)
class DispersionSpec:
    """One-sigma dispersions.

    Entry speed is scaled by ``1 + entry_speed_sigma * N(0, 1)``; the density
    multiplier by ``exp(density_multiplier_sigma * N(0, 1))``. Entry position
    errors are applied as the opposite shift of the target. Seeker noise
    comes from the scenario's seeker config.
    """

    entry_speed_sigma: float = 0.01
    entry_fpa_sigma: float = math.radians(0.2)
    entry_position_sigma: float = 1_000.0
    density_multiplier_sigma: float = 0.05
    target_offset_sigma: float = 0.0

    def __post_init__(self) -> None:
        for name in (
            "entry_speed_sigma",
            "entry_fpa_sigma",
            "entry_position_sigma",
            "density_multiplier_sigma",
            "target_offset_sigma",
        ):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0.0):
                raise ConfigError(name, f"must be non-negative, got {value!r}")

    @classmethod
    def none(cls) -> DispersionSpec:
        return cls(0.0, 0.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True)
class RunResult:
    run_index: int
    seed: int
    reason: str
    miss_distance: float
    impact_speed: float
    flight_time: float
    downrange: float
    phase_times: dict[str, float] = field(default_factory=dict)

    @property
    def succeeded(self) -> bool:
        return self.reason == SUCCESS_REASON


@dataclass(frozen=True)
class Summary:
    mean: float
    std: float
    min: float
    max: float

    @classmethod
    def of(cls, values: np.ndarray) -> Summary:
        return cls(
            mean=float(np.mean(values)),
            std=float(np.std(values)),
            min=float(np.min(values)),
            max=float(np.max(values)),
        )


@dataclass(frozen=True)
class CampaignReport:
    """Aggregate of a campaign.

    Miss statistics cover successful runs only; when every run failed
    ``all_failed`` is set and all statistics are None.
    """

    n_runs: int
    n_failures: int
    master_seed: int
    all_failed: bool
    failure_reasons: dict[str, int]
    miss_mean: float | None
    miss_std: float | None
    cep50: float | None
    cep90: float | None
    miss_max: float | None
    impact_speed: Summary | None
    flight_time: Summary | None
    scenario: str = ""
    runs: tuple[RunResult, ...] = ()

    @property
    def n_successes(self) -> int:
        return self.n_runs - self.n_failures


@dataclass(frozen=True)
class Campaign:
    """Everything a worker needs besides the run index."""

    base: Scenario
    spec: DispersionSpec
    master_seed: int


# ---------------------------------------------------------------------------
# Seeding and sampling
# ---------------------------------------------------------------------------


def _seed_sequence(master_seed: int, run_index: int) -> np.random.SeedSequence:
    if master_seed < 0 or run_index < 0:
        raise DomainError(
            f"seeds must be non-negative, got master_seed={master_seed}, run_index={run_index}"
        )
    return np.random.SeedSequence([master_seed, run_index])


def run_seed(master_seed: int, run_index: int) -> int:
    """Stable 32-bit seed identifying one run of a campaign."""
    return int(_seed_sequence(master_seed, run_index).generate_state(1)[0])


def run_streams(
    master_seed: int, run_index: int
) -> tuple[np.random.Generator, np.random.Generator]:
    """Independent (sampling, seeker noise) generators for one run."""
    sampling, noise = _seed_sequence(master_seed, run_index).spawn(2)
    return np.random.default_rng(sampling), np.random.default_rng(noise)


def sample_run(
    master_seed: int, run_index: int, base: Scenario, spec: DispersionSpec
) -> Scenario:
    """Perturbed copy of ``base`` for one run.

    The same seven normal draws are taken in the same order whatever the
    sigmas, so zero sigmas return a scenario equal to ``base``.
    """
    rng, _ = run_streams(master_seed, run_index)
    z_speed, z_fpa, z_down, z_cross, z_rho, z_target_down, z_target_cross = (
        float(z) for z in rng.standard_normal(7)
    )

    dispersion = EntryDispersion(
        speed_scale=base.dispersion.speed_scale * (1.0 + spec.entry_speed_sigma * z_speed),
        fpa_offset=base.dispersion.fpa_offset + spec.entry_fpa_sigma * z_fpa,
    )
    shift_down = -spec.entry_position_sigma * z_down + spec.target_offset_sigma * z_target_down
    shift_cross = -spec.entry_position_sigma * z_cross + spec.target_offset_sigma * z_target_cross
    if base.guidance.planar:
        shift_cross = 0.0
    target = TargetPlacement(
        downrange=base.target.downrange + shift_down,
        crossrange=base.target.crossrange + shift_cross,
    )
    environment = Environment(
        density_multiplier=base.environment.density_multiplier
        * math.exp(spec.density_multiplier_sigma * z_rho)
    )
    return replace(base, target=target, environment=environment, dispersion=dispersion)


# ---------------------------------------------------------------------------
# Running
# ---------------------------------------------------------------------------


def run_one(
    master_seed: int, run_index: int, base: Scenario, spec: DispersionSpec
) -> RunResult:
    scenario = sample_run(master_seed, run_index, base, spec)
    _, noise = run_streams(master_seed, run_index)
    trajectory = simulate(scenario, rng=noise)
    termination = trajectory.termination
    miss = termination.miss_distance
    result = RunResult(
        run_index=run_index,
        seed=run_seed(master_seed, run_index),
        reason=termination.reason.value,
        miss_distance=float("nan") if miss is None else float(miss),
        impact_speed=trajectory.final.speed,
        flight_time=trajectory.flight_time,
        downrange=ground_track(trajectory.final.position)[0],
        phase_times=trajectory.phase_times(),
    )
    logger.debug(
        "Run %d: %s, miss %.3f m, %.1f s", run_index, result.reason, result.miss_distance,
        result.flight_time,
    )
    return result


def _campaign_task(campaign: Campaign, run_index: int) -> RunResult:
    return run_one(campaign.master_seed, run_index, campaign.base, campaign.spec)


def run_batch(
    n: int,
    master_seed: int,
    base: Scenario,
    spec: DispersionSpec,
    parallelism: int | None = 1,
    verbose: bool = False,
) -> CampaignReport:
    """Run ``n`` dispersed propagations and aggregate them.

    The report is identical for any ``parallelism``: runs are seeded by index
    and aggregated in index order.

    Args:
        n (int): Number of runs, at least 1.
        master_seed (int): Campaign seed, non-negative.
        base (Scenario): Scenario to disperse.
        spec (DispersionSpec): Dispersion sigmas.
        parallelism (int | None): Worker processes; None uses the physical core count.
        verbose (bool): Show a progress bar.

    Returns:
        CampaignReport: Statistics plus the per-run results.
    """
    if n < 1:
        raise ContractError(f"a campaign needs at least one run, got {n}")
    workers = default_workers() if parallelism is None else parallelism
    if workers < 1:
        raise ContractError(f"parallelism must be at least 1, got {workers}")
    indices = list(range(n))
    campaign = Campaign(base=base, spec=spec, master_seed=master_seed)

    if workers == 1 or n == 1:
        results = [
            _campaign_task(campaign, i)
            for i in tqdm.tqdm(indices, desc="Monte Carlo runs", disable=not verbose)
        ]
    else:
        with CampaignPool(campaign, num_workers=min(workers, n)) as pool:
            results = pool.map(_campaign_task, indices, verbose=verbose)

    report = summarize(results, master_seed, scenario=base.name)
    logger.info(
        "Campaign of %d runs done: %d failures, CEP50 %s m",
        report.n_runs,
        report.n_failures,
        "n/a" if report.cep50 is None else f"{report.cep50:.3f}",
    )
    return report


# ---------------------------------------------------------------------------
# Statistics
# ---------------------------------------------------------------------------


def cep(radial_misses: Sequence[float] | np.ndarray, quantile: float) -> float:
    """Empirical radial-miss quantile with linear interpolation.

    Raises:
        DomainError: If the sequence is empty or ``quantile`` is outside (0, 1).
    """
    misses = np.asarray(radial_misses, dtype=np.float64)
    if misses.size == 0:
        raise DomainError("cep needs at least one miss distance")
    if not 0.0 < quantile < 1.0:
        raise DomainError(f"quantile must be in (0, 1), got {quantile!r}")
    return float(np.quantile(misses, quantile, method="linear"))


def summarize(
    results: Sequence[RunResult], master_seed: int, scenario: str = ""
) -> CampaignReport:
    """Aggregate run results in run-index order; failures are counted, not averaged."""
    ordered = tuple(sorted(results, key=lambda r: r.run_index))
    successes = [r for r in ordered if r.succeeded]
    failure_reasons = dict(sorted(Counter(r.reason for r in ordered if not r.succeeded).items()))
    n_failures = len(ordered) - len(successes)

    if not successes:
        logger.warning("All %d runs failed: %s", len(ordered), failure_reasons)
        return CampaignReport(
            n_runs=len(ordered),
            n_failures=n_failures,
            master_seed=master_seed,
            all_failed=True,
            failure_reasons=failure_reasons,
            miss_mean=None,
            miss_std=None,
            cep50=None,
            cep90=None,
            miss_max=None,
            impact_speed=None,
            flight_time=None,
            scenario=scenario,
            runs=ordered,
        )

    misses = np.array([r.miss_distance for r in successes])
    return CampaignReport(
        n_runs=len(ordered),
        n_failures=n_failures,
        master_seed=master_seed,
        all_failed=False,
        failure_reasons=failure_reasons,
        miss_mean=float(np.mean(misses)),
        miss_std=float(np.std(misses)),
        cep50=cep(misses, 0.5),
        cep90=cep(misses, 0.9),
        miss_max=float(np.max(misses)),
        impact_speed=Summary.of(np.array([r.impact_speed for r in successes])),
        flight_time=Summary.of(np.array([r.flight_time for r in successes])),
        scenario=scenario,
        runs=ordered,
    )
