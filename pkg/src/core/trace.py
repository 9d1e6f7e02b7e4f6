#!/usr/bin/env python3
"""
cimbench - Run traces

Time-stamped best-so-far energies of one solver trial, and the arithmetic the
benchmark protocol performs on them: time-to-target, averaging on a common time
grid, the simulated CIM clock and log-log scaling fits.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np
import pandas as pd

from config import CLOCK_FREQUENCIES_HZ, DEFAULT_ROUNDTRIP_SECONDS, TimeBase
from exceptions import ParameterError, TraceError

_TARGET_SLACK = 1e-9


@dataclass(eq=False)
class RunTrace:
    """
    Samples of one trial. work counts the solver's own unit (round trips, flips,
    sweeps); time_seconds is simulated CIM time or wall-clock depending on time_base.
    """

    solver_id: str
    trial_seed: int
    time_base: str
    work: np.ndarray
    time_seconds: np.ndarray
    best_energy: np.ndarray
    current_energy: np.ndarray
    work_unit: str = "round_trips"

    def __post_init__(self):
        self.work = np.asarray(self.work, dtype=np.int64)
        self.time_seconds = np.asarray(self.time_seconds, dtype=np.float64)
        self.best_energy = np.asarray(self.best_energy, dtype=np.float64)
        self.current_energy = np.asarray(self.current_energy, dtype=np.float64)
        sizes = {
            len(self.work),
            len(self.time_seconds),
            len(self.best_energy),
            len(self.current_energy),
        }
        if len(sizes) != 1:
            raise TraceError("trace columns have different lengths")
        if len(self.work) == 0:
            raise TraceError(f"trace for {self.solver_id} has no samples")
        if self.time_base not in (TimeBase.SIMULATED_CIM, TimeBase.WALL_CLOCK):
            raise TraceError(f"unknown time base {self.time_base!r}")
        if np.any(np.diff(self.time_seconds) <= 0):
            raise TraceError("trace times must be strictly increasing")
        if np.any(np.diff(self.best_energy) > 0):
            raise TraceError("best-so-far energy must be non-increasing")

    def __len__(self) -> int:
        return len(self.work)

    @property
    def samples(self) -> List[tuple]:
        """(time_seconds, best_energy) pairs"""
        return list(zip(self.time_seconds.tolist(), self.best_energy.tolist()))

    @property
    def final_best(self) -> float:
        return float(self.best_energy[-1])

    @property
    def total_work(self) -> int:
        return int(self.work[-1])

    @property
    def time_column(self) -> str:
        if self.time_base == TimeBase.SIMULATED_CIM:
            return "simulated_seconds"
        return "wall_seconds"

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                self.work_unit: self.work,
                self.time_column: self.time_seconds,
                "best_energy": self.best_energy,
                "current_energy": self.current_energy,
            }
        )

    def write_csv(self, path: Path) -> None:
        self.to_frame().to_csv(path, index=False)


class TraceRecorder:
    """Accumulates samples during a run and builds the RunTrace at the end"""

    def __init__(
        self,
        solver_id: str,
        trial_seed: int,
        time_base: str,
        work_unit: str = "round_trips",
    ):
        self.solver_id = solver_id
        self.trial_seed = trial_seed
        self.time_base = time_base
        self.work_unit = work_unit
        self._work: List[int] = []
        self._time: List[float] = []
        self._best: List[float] = []
        self._current: List[float] = []

    @property
    def best(self) -> float:
        return self._best[-1] if self._best else np.inf

    def record(
        self,
        work: int,
        time_seconds: float,
        current_energy: float,
        best_energy: Optional[float] = None,
    ) -> None:
        best = current_energy if best_energy is None else best_energy
        best = min(best, current_energy, self.best)
        if self._time and time_seconds <= self._time[-1]:
            # coarse clocks can repeat a reading
            time_seconds = float(np.nextafter(self._time[-1], np.inf))
        self._work.append(int(work))
        self._time.append(float(time_seconds))
        self._best.append(float(best))
        self._current.append(float(current_energy))

    def build(self) -> RunTrace:
        return RunTrace(
            solver_id=self.solver_id,
            trial_seed=self.trial_seed,
            time_base=self.time_base,
            work=np.array(self._work, dtype=np.int64),
            time_seconds=np.array(self._time),
            best_energy=np.array(self._best),
            current_energy=np.array(self._current),
            work_unit=self.work_unit,
        )


def _first_hit(trace: RunTrace, target_energy: float) -> Optional[int]:
    slack = _TARGET_SLACK * max(1.0, abs(target_energy))
    hits = np.flatnonzero(trace.best_energy <= target_energy + slack)
    return int(hits[0]) if len(hits) else None


def time_to_target(trace: RunTrace, target_energy: float) -> Optional[float]:
    """Earliest sample time whose best energy reaches the target, None if never"""
    k = _first_hit(trace, target_energy)
    return None if k is None else float(trace.time_seconds[k])


def work_to_target(trace: RunTrace, target_energy: float) -> Optional[int]:
    """Same as time_to_target, counted in the solver's work unit"""
    k = _first_hit(trace, target_energy)
    return None if k is None else int(trace.work[k])


@dataclass(frozen=True, eq=False)
class AveragedCurve:
    grid: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    n_traces: int

    def to_frame(self, x_label: str = "x") -> pd.DataFrame:
        return pd.DataFrame({x_label: self.grid, "mean": self.mean, "std": self.std})


def average_traces(
    traces: Sequence[RunTrace], grid: Iterable[float], axis: str = "time"
) -> AveragedCurve:
    """
    Interpolate every trace's best energy linearly onto the grid (holding the last
    value past the final sample), then take the mean and population std across traces.
    axis selects time_seconds ("time") or the work counter ("work") as abscissa.
    """
    if not traces:
        raise TraceError("cannot average an empty list of traces")
    if axis not in ("time", "work"):
        raise ParameterError(f"unknown averaging axis {axis!r} (time, work)")
    points = np.asarray(list(grid), dtype=np.float64)

    rows = []
    for trace in traces:
        x = trace.time_seconds if axis == "time" else trace.work.astype(np.float64)
        if len(points) and points.min() < x[0]:
            raise TraceError(
                f"grid starts at {points.min():g}, before the first sample "
                f"{x[0]:g} of {trace.solver_id} trial {trace.trial_seed}"
            )
        rows.append(np.interp(points, x, trace.best_energy))

    values = np.vstack(rows)
    return AveragedCurve(
        grid=points,
        mean=values.mean(axis=0),
        std=values.std(axis=0),
        n_traces=len(traces),
    )


def cim_clock_time(
    round_trips: int, roundtrip_seconds: float = DEFAULT_ROUNDTRIP_SECONDS
) -> float:
    """Simulated machine time: round trips x seconds per round trip"""
    if round_trips < 0:
        raise ParameterError(f"round trips must be >= 0, got {round_trips}")
    return round_trips * roundtrip_seconds


def clock_sweep(
    round_trips: int, frequencies_hz: Sequence[float] = CLOCK_FREQUENCIES_HZ
) -> Dict[float, float]:
    """CIM time for the same round-trip count at several pulse clock rates"""
    return {f: cim_clock_time(round_trips, 1.0 / f) for f in frequencies_hz}


def fit_exponent(sizes: Sequence[float], values: Sequence[float]) -> float:
    """Least-squares slope of log(value) against log(size)"""
    x = np.asarray(sizes, dtype=np.float64)
    y = np.asarray(values, dtype=np.float64)
    if len(x) != len(y) or len(x) < 2:
        raise ParameterError("exponent fit needs at least two (size, value) pairs")
    if np.any(x <= 0) or np.any(y <= 0):
        raise ParameterError("exponent fit needs strictly positive sizes and values")
    slope, _ = np.polyfit(np.log(x), np.log(y), 1)
    return float(slope)
