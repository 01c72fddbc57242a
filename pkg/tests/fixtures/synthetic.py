"""Hand-built trajectories and run results with exactly known outputs."""

import numpy as np

from reentrysim.dynamics import (
    Termination,
    TerminationReason,
    Trajectory,
    TrajectorySample,
)
from reentrysim.montecarlo import RunResult
from reentrysim.state import GuidanceCommand, PhaseId, PhaseTransition, State


def _state(t, x, phase, alpha):
    return State(
        t=t,
        position=np.array([x, 0.0, 0.0]),
        velocity=np.array([-1200.0, 1600.0, 0.0]),
        phase=phase,
        alpha=alpha,
    )


def synthetic_trajectory():
    """Three samples: entry, pull-up and a refined impact row."""
    entry_cmd = GuidanceCommand(cy_vertical=0.1, phase=PhaseId.ENTRY)
    pullup_cmd = GuidanceCommand(cy_vertical=0.25, cy_lateral=-0.05, phase=PhaseId.PULLUP)
    first = _state(0.0, 6_471_000.0, PhaseId.ENTRY, 0.0)
    second = _state(0.02, 6_470_976.0, PhaseId.PULLUP, 0.125)
    final = _state(0.0312345678, 6_470_962.5, PhaseId.DONE, 0.125)
    samples = (
        TrajectorySample(first, entry_cmd, mach=6.5, dynamic_pressure=1234.5, load_factor=0.25),
        TrajectorySample(second, pullup_cmd, mach=6.25, dynamic_pressure=2000.0, load_factor=1.5),
        TrajectorySample(
            final,
            GuidanceCommand(cy_vertical=0.25, cy_lateral=-0.05, phase=PhaseId.DONE),
            mach=6.0,
            dynamic_pressure=2100.25,
            load_factor=1.75,
        ),
    )
    transitions = (
        PhaseTransition.at(second, PhaseId.ENTRY, PhaseId.PULLUP),
        PhaseTransition.at(final, PhaseId.PULLUP, PhaseId.DONE),
    )
    return Trajectory(
        initial=first,
        samples=samples,
        termination=Termination(TerminationReason.IMPACT, final, miss_distance=1.25),
        transitions=transitions,
        dt=0.02,
    )


def synthetic_runs():
    """Eleven impacts with misses 0..10 m plus one timeout."""
    runs = [
        RunResult(
            run_index=i,
            seed=1000 + i,
            reason="impact",
            miss_distance=float(i),
            impact_speed=250.0,
            flight_time=300.0,
            downrange=700_000.0,
            phase_times={"pullup": 10.0, "cruise": 60.0, "terminal": 250.0, "done": 300.0},
        )
        for i in range(11)
    ]
    runs.append(
        RunResult(
            run_index=11,
            seed=1011,
            reason="timeout",
            miss_distance=5000.0,
            impact_speed=900.0,
            flight_time=3600.0,
            downrange=650_000.0,
            phase_times={"pullup": 10.0, "cruise": 60.0, "done": 3600.0},
        )
    )
    return runs
