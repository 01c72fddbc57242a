"""Output files: trajectory CSV, run summary, per-run table and campaign report.

All writers are deterministic for identical inputs: no timestamps or host
details go into file contents.
"""

from __future__ import annotations

import csv
import math
from collections.abc import Iterable
from pathlib import Path

import orjson

from .dynamics import Trajectory, ground_track
from .montecarlo import CampaignReport, Summary
from .scenario import Scenario, coast_time
from .state import PhaseId

REPORT_SCHEMA_VERSION = 1

TRAJECTORY_COLUMNS = (
    "t",
    "x",
    "y",
    "z",
    "altitude",
    "speed",
    "mach",
    "dynamic_pressure",
    "phase",
    "cy_vertical",
    "cy_lateral",
    "alpha",
)

RUN_COLUMNS = (
    "run_index",
    "seed",
    "reason",
    "miss_distance",
    "impact_speed",
    "flight_time",
    "downrange",
    *(f"t_{phase.label}" for phase in PhaseId if phase is not PhaseId.ENTRY),
)


def fmt(value: float) -> str:
    """Nine significant digits, the precision of every numeric CSV field."""
    return format(value, ".9g")


def _prepare(destination: str | Path) -> Path:
    path = Path(destination)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def trajectory_rows(trajectory: Trajectory) -> Iterable[list[str]]:
    for sample in trajectory.samples:
        state, command = sample.state, sample.command
        x, y, z = state.position
        yield [
            fmt(state.t),
            fmt(float(x)),
            fmt(float(y)),
            fmt(float(z)),
            fmt(state.altitude),
            fmt(state.speed),
            fmt(sample.mach),
            fmt(sample.dynamic_pressure),
            str(int(state.phase)),
            fmt(command.cy_vertical),
            fmt(command.cy_lateral),
            fmt(state.alpha),
        ]


def write_trajectory(trajectory: Trajectory, destination: str | Path) -> Path:
    """Write one row per integration step plus the final row.

    Raises:
        OSError: If the destination cannot be written.
    """
    path = _prepare(destination)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(TRAJECTORY_COLUMNS)
        writer.writerows(trajectory_rows(trajectory))
    return path


def summary_lines(trajectory: Trajectory, scenario: Scenario) -> list[str]:
    """Human-readable ``key: value`` lines describing one run."""
    termination = trajectory.termination
    final = trajectory.final
    downrange, crossrange = ground_track(final.position)
    miss = termination.miss_distance
    lines = [
        f"scenario: {scenario.name}",
        f"termination: {termination.reason.value}",
        f"miss_distance_m: {'n/a' if miss is None else f'{miss:.3f}'}",
        f"flight_time_s: {trajectory.flight_time:.3f}",
    ]
    coast = coast_time(scenario)
    if coast is not None:
        lines.append(f"coast_time_s: {coast:.3f}")
    lines += [
        f"impact_speed_m_s: {final.speed:.3f}",
        f"downrange_m: {downrange:.3f}",
        f"crossrange_m: {crossrange:.3f}",
        f"peak_load_factor_g: {trajectory.peak_load_factor:.3f}",
        f"peak_dynamic_pressure_pa: {trajectory.peak_dynamic_pressure:.1f}",
    ]
    for tr in trajectory.transitions:
        lines.append(
            f"phase {tr.to_phase.label}: t={tr.t:.3f} s altitude={tr.altitude:.1f} m "
            f"speed={tr.speed:.1f} m/s fpa={math.degrees(tr.flight_path_angle):.3f} deg"
        )
    return lines


def write_summary(trajectory: Trajectory, scenario: Scenario, destination: str | Path) -> Path:
    path = _prepare(destination)
    path.write_text("\n".join(summary_lines(trajectory, scenario)) + "\n", encoding="utf-8")
    return path


def write_runs_table(report: CampaignReport, destination: str | Path) -> Path:
    """One CSV row per run; phase columns hold the time the phase was entered."""
    path = _prepare(destination)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(RUN_COLUMNS)
        for run in report.runs:
            phase_times = [
                fmt(run.phase_times[phase.label]) if phase.label in run.phase_times else ""
                for phase in PhaseId
                if phase is not PhaseId.ENTRY
            ]
            writer.writerow(
                [
                    str(run.run_index),
                    str(run.seed),
                    run.reason,
                    fmt(run.miss_distance),
                    fmt(run.impact_speed),
                    fmt(run.flight_time),
                    fmt(run.downrange),
                    *phase_times,
                ]
            )
    return path


def _summary_document(summary: Summary | None) -> dict | None:
    if summary is None:
        return None
    return {"mean": summary.mean, "std": summary.std, "min": summary.min, "max": summary.max}


def report_document(report: CampaignReport) -> dict:
    """The campaign report as a plain dict (the documented report schema)."""
    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "scenario": report.scenario,
        "master_seed": report.master_seed,
        "n_runs": report.n_runs,
        "n_successes": report.n_successes,
        "n_failures": report.n_failures,
        "all_failed": report.all_failed,
        "failure_reasons": report.failure_reasons,
        "miss_distance": {
            "mean": report.miss_mean,
            "std": report.miss_std,
            "cep50": report.cep50,
            "cep90": report.cep90,
            "max": report.miss_max,
        },
        "impact_speed": _summary_document(report.impact_speed),
        "flight_time": _summary_document(report.flight_time),
    }


def dump_report(report: CampaignReport) -> bytes:
    return orjson.dumps(
        report_document(report),
        option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS | orjson.OPT_APPEND_NEWLINE,
    )


def write_report(report: CampaignReport, destination: str | Path) -> Path:
    path = _prepare(destination)
    path.write_bytes(dump_report(report))
    return path
