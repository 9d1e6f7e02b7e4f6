#!/usr/bin/env python3
"""
cimbench - Classical MAX-CUT heuristics

Simulated annealing with logarithmic cooling, the SG3 greedy, steepest descent,
a simplified breakout local search and multistart descent. Every run keeps its
own GainTable; the Graph is shared read-only.
"""

import math
import time
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from config import TimeBase
from core import kernels
from core.graph import CutResult, Graph, as_spins
from core.seeding import seed_label
from core.trace import RunTrace, TraceRecorder
from exceptions import ParameterError


# proposals handed to the kernel per call (at least N)
_SA_CHUNK = 1 << 14


class ScheduleKind:
    LOGARITHMIC = "logarithmic"
    CONSTANT = "constant"


class C0Rule:
    ROW_SUM = "row-sum"
    RMS_FIELD = "rms-field"


@dataclass(frozen=True)
class SaSchedule:
    """
    Annealing temperature law and flip budget. The logarithmic law indexes
    temperature by k // flips_per_step: 1 cools on every proposal, N holds T
    for a Monte Carlo step of N proposals.
    """

    c0: float
    total_flips: int
    schedule_kind: str = ScheduleKind.LOGARITHMIC
    sample_every: Optional[int] = None
    flips_per_step: int = 1

    def __post_init__(self):
        if not self.c0 > 0:
            raise ParameterError(f"c0 must be > 0, got {self.c0}")
        if int(self.total_flips) < 1:
            raise ParameterError(f"total_flips must be >= 1, got {self.total_flips}")
        if self.schedule_kind not in (ScheduleKind.LOGARITHMIC, ScheduleKind.CONSTANT):
            raise ParameterError(f"unknown schedule kind {self.schedule_kind!r}")
        if self.sample_every is not None and self.sample_every < 1:
            raise ParameterError(f"sample_every must be >= 1, got {self.sample_every}")
        if int(self.flips_per_step) < 1:
            raise ParameterError(f"flips_per_step must be >= 1, got {self.flips_per_step}")

    @classmethod
    def for_graph(
        cls,
        graph: Graph,
        total_flips: int,
        c0_rule: str = C0Rule.ROW_SUM,
        per_sweep: bool = False,
        **kwargs,
    ) -> "SaSchedule":
        if per_sweep:
            kwargs.setdefault("flips_per_step", graph.n_vertices)
        return cls(c0=initial_temperature(graph, c0_rule), total_flips=total_flips, **kwargs)

    def temperatures(self, start: int, count: int) -> np.ndarray:
        if self.schedule_kind == ScheduleKind.CONSTANT:
            return np.full(count, float(self.c0))
        k = np.arange(start, start + count, dtype=np.int64) // int(self.flips_per_step)
        return self.c0 / np.log(2.0 + k)


def initial_temperature(graph: Graph, rule: str = C0Rule.ROW_SUM) -> float:
    """row-sum: max_i sum_j |w_ij|;  rms-field: sqrt(mean_i sum_j w_ij^2)"""
    if rule == C0Rule.ROW_SUM:
        value = float(graph.abs_row_sums.max()) if graph.n_edges else 0.0
    elif rule == C0Rule.RMS_FIELD:
        squares = np.bincount(
            np.concatenate([graph.heads, graph.tails]),
            weights=np.concatenate([graph.weights, graph.weights]) ** 2,
            minlength=graph.n_vertices,
        )
        value = math.sqrt(float(squares.mean()))
    else:
        raise ParameterError(f"unknown c0 rule {rule!r} ({C0Rule.ROW_SUM}, {C0Rule.RMS_FIELD})")
    return value if value > 0 else 1.0


def metropolis_accept(delta_e: float, temp: float, rng: np.random.Generator) -> bool:
    """Downhill or level moves always; uphill with probability exp(-dE/temp)"""
    if not temp > 0:
        raise ParameterError(f"temperature must be > 0, got {temp}")
    if delta_e <= 0:
        return True
    return bool(rng.random() < math.exp(-delta_e / temp))


def log_temperature(flip_index: int, schedule: SaSchedule) -> float:
    """T_k = c0 / ln(2 + k), k counted in steps of schedule.flips_per_step flips"""
    if flip_index < 0:
        raise ParameterError(f"flip index must be >= 0, got {flip_index}")
    return float(schedule.temperatures(flip_index, 1)[0])


class GainTable:
    """Local fields and single-flip energy changes, updated incrementally"""

    def __init__(self, graph: Graph, spins):
        self.graph = graph
        self.indptr, self.indices, self.data = graph.csr_arrays
        self.spins = as_spins(spins, graph.n_vertices).copy()
        self.field = kernels.local_fields(self.indptr, self.indices, self.data, self.spins)

    @property
    def gains(self) -> np.ndarray:
        """dE_i = -2 s_i h_i for every vertex"""
        return -2.0 * self.spins * self.field

    @property
    def energy(self) -> float:
        return 0.5 * float(np.dot(self.spins, self.field))

    def delta(self, v: int) -> float:
        return -2.0 * float(self.spins[v]) * float(self.field[v])

    def flip(self, v: int) -> float:
        return kernels.flip_vertex(
            self.indptr, self.indices, self.data, self.spins, self.field, int(v)
        )

    def recompute(self) -> np.ndarray:
        """From-scratch gains for the current spins"""
        field = kernels.local_fields(self.indptr, self.indices, self.data, self.spins)
        return -2.0 * self.spins * field

    def descend(self, locked: Optional[np.ndarray] = None, max_flips: int = -1) -> Tuple[float, int]:
        if locked is None:
            locked = np.zeros(len(self.spins), dtype=np.bool_)
        return kernels.descend(
            self.indptr, self.indices, self.data, self.spins, self.field, locked, max_flips
        )


def _random_spins(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.choice(np.array([-1, 1], dtype=np.int8), size=n)


class _Stopwatch:
    def __init__(self, time_budget: Optional[float]):
        self.time_budget = time_budget
        self.start = time.perf_counter()

    @property
    def elapsed(self) -> float:
        return time.perf_counter() - self.start

    def expired(self) -> bool:
        return self.time_budget is not None and self.elapsed >= self.time_budget


def sa_run(
    graph: Graph,
    schedule: SaSchedule,
    seed=None,
    flip_budget: Optional[int] = None,
    time_budget: Optional[float] = None,
    solver_id: str = "sa",
    stop_energy: Optional[float] = None,
) -> Tuple[RunTrace, CutResult]:
    """
    Metropolis annealing from random spins with single-flip proposals drawn
    uniformly. Stops at the flip budget (schedule.total_flips unless overridden),
    at the wall-clock budget, or on the proposal that reaches stop_energy.
    Fields and energy are rebuilt from the spins after every N proposals.
    """
    rng = np.random.default_rng(seed)
    n = graph.n_vertices
    table = GainTable(graph, _random_spins(rng, n))
    best_spins = table.spins.copy()
    energy = table.energy
    best = energy

    if flip_budget is None and time_budget is not None:
        total = math.inf
    else:
        total = schedule.total_flips if flip_budget is None else int(flip_budget)
    chunk = schedule.sample_every or max(n, _SA_CHUNK)
    stop = -math.inf if stop_energy is None else float(stop_energy)

    recorder = TraceRecorder(solver_id, seed_label(seed), TimeBase.WALL_CLOCK, "flips")
    clock = _Stopwatch(time_budget)
    recorder.record(0, clock.elapsed, energy, best)

    done = 0
    while done < total:
        count = int(min(chunk, total - done))
        proposals = rng.integers(0, n, size=count)
        uniforms = rng.random(count)
        temps = schedule.temperatures(done, count)
        energy, best, _, used = kernels.anneal_chunk(
            table.indptr,
            table.indices,
            table.data,
            table.spins,
            table.field,
            best_spins,
            proposals,
            uniforms,
            temps,
            energy,
            best,
            done,
            n,
            stop,
        )
        done += used
        recorder.record(done, clock.elapsed, energy, best)
        if clock.expired() or best <= stop:
            break

    return recorder.build(), CutResult.evaluate(graph, best_spins)


def metropolis_samples(
    graph: Graph, temperature: float, n_samples: int, seed=None, thin: int = 1
) -> np.ndarray:
    """Spin states of a fixed-temperature Metropolis chain, one row per sample"""
    if not temperature > 0:
        raise ParameterError(f"temperature must be > 0, got {temperature}")
    rng = np.random.default_rng(seed)
    table = GainTable(graph, _random_spins(rng, graph.n_vertices))
    count = n_samples * thin
    return kernels.metropolis_trajectory(
        table.indptr,
        table.indices,
        table.data,
        table.spins,
        table.field,
        rng.integers(0, graph.n_vertices, size=count),
        rng.random(count),
        float(temperature),
        thin,
    )


def sg3_run(graph: Graph) -> CutResult:
    """
    Deterministic greedy: start from the first maximum-weight edge, then place the
    unassigned vertex with the largest |a_i - b_i| on the side that cuts more.
    """
    if graph.n_edges == 0:
        return CutResult.evaluate(graph, np.ones(graph.n_vertices, dtype=np.int8))
    k = int(np.argmax(graph.weights))
    indptr, indices, data = graph.csr_arrays
    spins = kernels.sg3_assign(
        indptr,
        indices,
        data,
        graph.n_vertices,
        int(graph.heads[k]),
        int(graph.tails[k]),
    )
    return CutResult.evaluate(graph, spins)


def steepest_descent(graph: Graph, spins) -> CutResult:
    """Flip the most improving vertex until the configuration is 1-flip optimal"""
    table = GainTable(graph, spins)
    table.descend()
    return CutResult.evaluate(graph, table.spins)


@dataclass(frozen=True)
class BlsConfig:
    """Perturbation mix of the breakout search; random_flips None means max(3, N // 100)"""

    p_single: float = 0.5
    p_pair: float = 0.3
    p_random: float = 0.2
    random_flips: Optional[int] = None
    flip_budget: Optional[int] = 10**5
    time_budget: Optional[float] = None

    def __post_init__(self):
        probabilities = (self.p_single, self.p_pair, self.p_random)
        if min(probabilities) < 0 or not math.isclose(sum(probabilities), 1.0):
            raise ParameterError(f"perturbation probabilities must sum to 1, got {probabilities}")
        if self.random_flips is not None and self.random_flips < 1:
            raise ParameterError(f"random_flips must be >= 1, got {self.random_flips}")
        if self.flip_budget is None and self.time_budget is None:
            raise ParameterError("breakout search needs a flip or time budget")

    def random_count(self, n: int) -> int:
        count = self.random_flips if self.random_flips is not None else max(3, n // 100)
        return min(count, n)


def _best_pair(graph: Graph, table: GainTable) -> Optional[Tuple[int, int]]:
    if graph.n_edges == 0:
        return None
    gains = table.gains
    s = table.spins.astype(np.float64)
    h, t = graph.heads, graph.tails
    # flipping both ends leaves w_ht s_h s_t unchanged, each single gain counted it once
    pair = gains[h] + gains[t] + 4.0 * graph.weights * s[h] * s[t]
    k = int(np.argmin(pair))
    return int(h[k]), int(t[k])


def _perturb(
    graph: Graph,
    table: GainTable,
    config: BlsConfig,
    rng: np.random.Generator,
    locked: np.ndarray,
) -> int:
    n = graph.n_vertices
    draw = rng.random()
    if draw < config.p_single:
        chosen = [int(np.argmin(table.gains))]
    elif draw < config.p_single + config.p_pair and graph.n_edges:
        chosen = list(_best_pair(graph, table))
    else:
        chosen = rng.choice(n, size=config.random_count(n), replace=False).tolist()
    for v in chosen:
        table.flip(v)
        locked[v] = True
    return len(chosen)


def bls_run(
    graph: Graph,
    seed=None,
    config: Optional[BlsConfig] = None,
    solver_id: str = "bls",
    stop_energy: Optional[float] = None,
) -> Tuple[RunTrace, CutResult]:
    """
    Alternate steepest descent with a forced perturbation: the least harmful single
    flip, the least harmful adjacent pair flip, or L random flips. Perturbed
    vertices stay frozen during the following descent.
    """
    config = config or BlsConfig()
    rng = np.random.default_rng(seed)
    n = graph.n_vertices
    table = GainTable(graph, _random_spins(rng, n))
    locked = np.zeros(n, dtype=np.bool_)
    budget = config.flip_budget

    recorder = TraceRecorder(solver_id, seed_label(seed), TimeBase.WALL_CLOCK, "flips")
    clock = _Stopwatch(config.time_budget)
    best = np.inf
    best_spins = table.spins.copy()
    done = 0
    while True:
        remaining = -1 if budget is None else max(0, budget - done)
        _, flips = table.descend(locked, remaining)
        done += flips
        locked[:] = False

        energy = table.energy
        if energy < best:
            best = energy
            best_spins = table.spins.copy()
        recorder.record(done, clock.elapsed, energy, best)

        if budget is not None and done >= budget:
            break
        if clock.expired() or (stop_energy is not None and best <= stop_energy):
            break
        done += _perturb(graph, table, config, rng, locked)

    return recorder.build(), CutResult.evaluate(graph, best_spins)


def restart_descent_run(
    graph: Graph,
    seed=None,
    flip_budget: Optional[int] = 10**5,
    time_budget: Optional[float] = None,
    solver_id: str = "descent",
    stop_energy: Optional[float] = None,
) -> Tuple[RunTrace, CutResult]:
    """Multistart steepest descent from random spins under the same budgets as BLS"""
    if flip_budget is None and time_budget is None:
        raise ParameterError("restart descent needs a flip or time budget")
    rng = np.random.default_rng(seed)
    n = graph.n_vertices
    recorder = TraceRecorder(solver_id, seed_label(seed), TimeBase.WALL_CLOCK, "flips")
    clock = _Stopwatch(time_budget)
    best = np.inf
    best_spins = None
    done = 0
    while True:
        table = GainTable(graph, _random_spins(rng, n))
        remaining = -1 if flip_budget is None else max(0, flip_budget - done)
        _, flips = table.descend(max_flips=remaining)
        # a start that is already locally optimal still costs one unit
        done += max(flips, 1)

        energy = table.energy
        if energy < best:
            best = energy
            best_spins = table.spins.copy()
        recorder.record(done, clock.elapsed, energy, best)

        if flip_budget is not None and done >= flip_budget:
            break
        if clock.expired() or (stop_energy is not None and best <= stop_energy):
            break

    return recorder.build(), CutResult.evaluate(graph, best_spins)
