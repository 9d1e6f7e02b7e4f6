#!/usr/bin/env python3
"""
cimbench - Coherent Ising machine simulation

Euler-Maruyama integration of the c-number stochastic differential equations of a
network of degenerate optical parametric oscillator pulses with measurement
feedback. Amplitude arrays may carry a leading batch axis so that many
independent trials advance in one vectorised step.

Per round trip, with measured amplitudes c~_j = c_j - sqrt((1-T)/T) f_j / A_s:
    dc_i = [(-1 + p - c_i^2 - s_i^2) c_i + sum_j xi_ij c~_j] dt + (1/A_s) sqrt(c_i^2 + s_i^2 + 1/2) dW1
    ds_i = [(-1 - p - c_i^2 - s_i^2) s_i] dt + (1/A_s) sqrt(c_i^2 + s_i^2 + 1/2) dW2
"""

import math
from dataclasses import dataclass, fields, replace
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np
import pandas as pd
import scipy.sparse as sp

from config import DEFAULT_ROUNDTRIP_SECONDS, TimeBase
from core.graph import CutResult, Graph
from core.seeding import SeedLike, derive_seed, seed_label
from core.trace import RunTrace, TraceRecorder, cim_clock_time
from exceptions import DivergenceError, ParameterError

_FOUR_BODY_OTHERS = np.array([[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]])


@dataclass(frozen=True)
class CimParams:
    """SDE parameters; a_s = inf switches every noise source off"""

    p: float = 1.1
    xi: float = -0.1
    a_s: float = 100.0
    t_coupler: float = 0.1
    dt: float = 0.05
    round_trips: int = 2000
    normalize_by_degree: bool = False
    roundtrip_seconds: float = DEFAULT_ROUNDTRIP_SECONDS

    def __post_init__(self):
        if not self.a_s > 0:
            raise ParameterError(f"a_s must be > 0, got {self.a_s}")
        if not 0 < self.t_coupler < 1:
            raise ParameterError(f"t_coupler must lie in (0, 1), got {self.t_coupler}")
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ParameterError(f"dt must be a positive number, got {self.dt}")
        if int(self.round_trips) < 1:
            raise ParameterError(f"round_trips must be >= 1, got {self.round_trips}")
        if not self.roundtrip_seconds > 0:
            raise ParameterError(
                f"roundtrip_seconds must be > 0, got {self.roundtrip_seconds}"
            )
        object.__setattr__(self, "round_trips", int(self.round_trips))

    @classmethod
    def from_dict(cls, block: Dict[str, Any]) -> "CimParams":
        known = {f.name for f in fields(cls)}
        unknown = set(block) - known
        if unknown:
            raise ParameterError(f"unknown CIM parameters: {', '.join(sorted(unknown))}")
        return cls(**block)

    def with_overrides(self, **changes) -> "CimParams":
        return replace(self, **changes)

    @property
    def noiseless(self) -> bool:
        return math.isinf(self.a_s)

    @property
    def noise_scale(self) -> float:
        return 0.0 if self.noiseless else 1.0 / self.a_s

    @property
    def measurement_scale(self) -> float:
        """Prefactor sqrt((1-T)/T) / A_s of the measurement noise"""
        return math.sqrt((1.0 - self.t_coupler) / self.t_coupler) * self.noise_scale


@dataclass(frozen=True)
class ZeemanSchedule:
    """
    Hysteretic optimisation: after free_roundtrips, each of `cycles` windows of
    cycle_roundtrips applies h(t) eps_i with a fresh random pattern eps per window.
    h is a square wave that changes sign flips_per_cycle times per window, with
    amplitude amplitude0 * decay**cycle.
    """

    free_roundtrips: int = 1000
    cycles: int = 4
    cycle_roundtrips: int = 1000
    amplitude0: float = 0.2
    decay: float = 0.5
    flips_per_cycle: int = 2

    def __post_init__(self):
        for name in ("free_roundtrips", "cycles", "cycle_roundtrips", "flips_per_cycle"):
            if int(getattr(self, name)) < 1:
                raise ParameterError(f"{name} must be >= 1, got {getattr(self, name)}")
        if not 0 < self.decay < 1:
            raise ParameterError(f"decay must lie in (0, 1), got {self.decay}")

    @classmethod
    def from_dict(cls, block: Dict[str, Any]) -> "ZeemanSchedule":
        known = {f.name for f in fields(cls)}
        unknown = set(block) - known
        if unknown:
            raise ParameterError(f"unknown schedule fields: {', '.join(sorted(unknown))}")
        return cls(**block)

    @property
    def total_roundtrips(self) -> int:
        return self.free_roundtrips + self.cycles * self.cycle_roundtrips

    def cycle_of(self, round_trip: int) -> Optional[int]:
        """Hysteretic cycle that round trip belongs to, None outside the cycles"""
        k = round_trip - self.free_roundtrips
        if k < 0 or k >= self.cycles * self.cycle_roundtrips:
            return None
        return k // self.cycle_roundtrips

    def field(self, round_trip: int) -> float:
        """Signed field strength h at a round trip (0 outside the cycles)"""
        cycle = self.cycle_of(round_trip)
        if cycle is None:
            return 0.0
        position = (round_trip - self.free_roundtrips) % self.cycle_roundtrips
        segment = position * (self.flips_per_cycle + 1) // self.cycle_roundtrips
        sign = 1.0 if segment % 2 == 0 else -1.0
        return sign * self.amplitude0 * self.decay**cycle


class CouplingMatrix:
    """Symmetric feedback matrix xi_ij, dense ndarray or CSR"""

    def __init__(self, matrix: Union[np.ndarray, sp.csr_matrix]):
        if matrix.shape[0] != matrix.shape[1]:
            raise ParameterError(f"coupling matrix must be square, got {matrix.shape}")
        self.matrix = matrix

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def is_dense(self) -> bool:
        return isinstance(self.matrix, np.ndarray)

    def dot(self, amplitudes: np.ndarray) -> np.ndarray:
        """sum_j xi_ij x_j along the last axis"""
        if amplitudes.ndim == 1:
            return np.asarray(self.matrix @ amplitudes)
        return np.asarray(self.matrix @ amplitudes.T).T

    def toarray(self) -> np.ndarray:
        return self.matrix if self.is_dense else self.matrix.toarray()


class RowStreams:
    """
    Independent streams per batch row, so row k of a batch draws the same numbers
    whatever the batch size. Row k takes normals from derive_seed(seed, k, 0),
    drawn ahead in blocks, and pattern choices from derive_seed(seed, k, 1).
    """

    _BUFFER_FLOATS = 1 << 22

    def __init__(self, seed: SeedLike, rows: int):
        root = np.random.SeedSequence() if seed is None else seed
        self.generators = [np.random.default_rng(derive_seed(root, k, 0)) for k in range(rows)]
        self.choosers = [np.random.default_rng(derive_seed(root, k, 1)) for k in range(rows)]
        self._buffer = np.empty((rows, 0))
        self._pos = 0

    @property
    def rows(self) -> int:
        return len(self.generators)

    def standard_normal(self, shape: Tuple[int, int]) -> np.ndarray:
        rows, width = shape
        if rows != self.rows:
            raise ParameterError(f"draw for {rows} rows from {self.rows} streams")
        if self._pos + width > self._buffer.shape[1]:
            span = width * max(1, min(256, self._BUFFER_FLOATS // (rows * width)))
            leftover = self._buffer[:, self._pos :]
            fresh = np.stack([g.standard_normal(span) for g in self.generators])
            self._buffer = np.concatenate([leftover, fresh], axis=1)
            self._pos = 0
        out = self._buffer[:, self._pos : self._pos + width]
        self._pos += width
        return out

    def choice(self, values: np.ndarray, size: Tuple[int, int]) -> np.ndarray:
        return np.stack([g.choice(values, size=size[1]) for g in self.choosers])


@dataclass(eq=False)
class CimState:
    """In-phase and quadrature amplitudes plus the trial's random stream"""

    c: np.ndarray
    s: np.ndarray
    round_trip: int
    rng: Union[np.random.Generator, RowStreams]

    @property
    def n(self) -> int:
        return self.c.shape[-1]


def build_coupling(graph: Graph, params: CimParams) -> CouplingMatrix:
    """xi_ij = xi w_ij, divided by sqrt(<k>) when normalize_by_degree is set"""
    scale = params.xi
    if params.normalize_by_degree:
        if graph.n_edges == 0:
            raise ParameterError("degree normalisation needs a graph with edges")
        scale /= math.sqrt(graph.average_degree)
    matrix = graph.adjacency * scale
    if graph.is_dense:
        return CouplingMatrix(matrix.toarray())
    return CouplingMatrix(matrix.tocsr())


def init_state(
    n: int, seed: SeedLike = None, batch: Optional[int] = None, per_row: bool = False
) -> CimState:
    """
    Vacuum start: c = s = 0 (optionally with a leading batch axis). per_row gives
    each batch row its own stream derived from seed.
    """
    if n < 1:
        raise ParameterError(f"state needs n >= 1, got {n}")
    shape = (n,) if batch is None else (batch, n)
    if per_row and batch is not None:
        rng = RowStreams(seed, batch)
    else:
        rng = np.random.default_rng(seed)
    return CimState(c=np.zeros(shape), s=np.zeros(shape), round_trip=0, rng=rng)


def measured_amplitudes(state: CimState, params: CimParams) -> np.ndarray:
    """c~ = c - sqrt((1-T)/T) f / A_s, one standard-normal f per pulse"""
    scale = params.measurement_scale
    if scale == 0.0:
        return state.c.copy()
    return state.c - scale * state.rng.standard_normal(state.c.shape)


def drift(
    c: np.ndarray, s: np.ndarray, feedback: np.ndarray, p: float
) -> Tuple[np.ndarray, np.ndarray]:
    """Deterministic right-hand side (dc/dt, ds/dt)"""
    power = c * c + s * s
    return (-1.0 + p - power) * c + feedback, (-1.0 - p - power) * s


def _advance(
    state: CimState,
    feedback: np.ndarray,
    params: CimParams,
    field: Optional[np.ndarray] = None,
) -> CimState:
    c, s = state.c, state.s
    dc, ds = drift(c, s, feedback, params.p)
    if field is not None:
        dc = dc + field
    c_new = c + dc * params.dt
    s_new = s + ds * params.dt
    if not params.noiseless:
        amplitude = params.noise_scale * np.sqrt(c * c + s * s + 0.5) * math.sqrt(params.dt)
        c_new += amplitude * state.rng.standard_normal(c.shape)
        s_new += amplitude * state.rng.standard_normal(s.shape)

    round_trip = state.round_trip + 1
    if not (np.all(np.isfinite(c_new)) and np.all(np.isfinite(s_new))):
        raise DivergenceError(round_trip)
    return CimState(c_new, s_new, round_trip, state.rng)


def step(
    state: CimState,
    coupling: CouplingMatrix,
    params: CimParams,
    field: Optional[np.ndarray] = None,
) -> CimState:
    """One round trip; field is an optional external term added to dc/dt"""
    if coupling.n != state.n:
        raise ParameterError(
            f"coupling is {coupling.n}x{coupling.n}, state has {state.n} pulses"
        )
    feedback = coupling.dot(measured_amplitudes(state, params))
    return _advance(state, feedback, params, field)


def four_body_step(state: CimState, j1234: float, params: CimParams) -> CimState:
    """
    Round trip of the N=4 four-body machine. Pulse i receives
    xi_eff * prod_{j != i} c~_j with xi_eff = -xi * J_1234, the same sign rule as
    the two-body coupling xi_ij = xi w_ij = -xi J_ij.
    """
    if state.n != 4:
        raise ParameterError(f"four-body coupling needs exactly 4 pulses, got {state.n}")
    measured = measured_amplitudes(state, params)
    products = np.prod(measured[..., _FOUR_BODY_OTHERS], axis=-1)
    return _advance(state, -params.xi * j1234 * products, params)


def readout(state: CimState) -> np.ndarray:
    """sign(c) with sign(0) = +1"""
    return np.where(state.c >= 0, 1, -1).astype(np.int8)


def evolve(
    state: CimState,
    coupling: CouplingMatrix,
    params: CimParams,
    steps: int,
    record: bool = False,
) -> Tuple[CimState, Optional[np.ndarray]]:
    """
    Advance several round trips. With record=True also returns the in-phase
    amplitude history, shape (steps + 1, *c.shape), initial state included.
    """
    history = None
    if record:
        history = np.empty((steps + 1,) + state.c.shape)
        history[0] = state.c
    for k in range(steps):
        state = step(state, coupling, params)
        if history is not None:
            history[k + 1] = state.c
    return state, history


def _zeeman_field(
    schedule: Optional[ZeemanSchedule],
    round_trip: int,
    state: CimState,
    pattern: Optional[np.ndarray],
    pattern_cycle: Optional[int],
) -> Tuple[Optional[np.ndarray], Optional[np.ndarray], Optional[int]]:
    if schedule is None:
        return None, pattern, pattern_cycle
    cycle = schedule.cycle_of(round_trip)
    if cycle is None:
        return None, pattern, pattern_cycle
    if cycle != pattern_cycle:
        pattern = state.rng.choice(np.array([-1.0, 1.0]), size=state.c.shape)
        pattern_cycle = cycle
    return schedule.field(round_trip) * pattern, pattern, pattern_cycle


def run_trial(
    graph: Graph,
    params: CimParams,
    schedule: Optional[ZeemanSchedule] = None,
    seed: SeedLike = None,
    solver_id: str = "cim",
    stop_energy: Optional[float] = None,
) -> Tuple[RunTrace, CutResult]:
    """
    Evolve params.round_trips round trips from vacuum, reading spins out after
    every trip. The trace holds best-so-far Ising energies against simulated
    machine time. stop_energy ends the trial early once it is reached.
    """
    coupling = build_coupling(graph, params)
    adjacency = graph.adjacency
    state = init_state(graph.n_vertices, seed)
    recorder = TraceRecorder(solver_id, seed_label(seed), TimeBase.SIMULATED_CIM)

    best_energy = np.inf
    best_spins = readout(state)
    pattern, pattern_cycle = None, None
    for r in range(params.round_trips):
        field, pattern, pattern_cycle = _zeeman_field(
            schedule, r, state, pattern, pattern_cycle
        )
        state = step(state, coupling, params, field)

        spins = readout(state)
        sigma = spins.astype(np.float64)
        energy = 0.5 * float(sigma @ (adjacency @ sigma))
        if energy < best_energy:
            best_energy = energy
            best_spins = spins
        recorder.record(
            state.round_trip,
            cim_clock_time(state.round_trip, params.roundtrip_seconds),
            energy,
            best_energy,
        )
        if stop_energy is not None and best_energy <= stop_energy:
            break

    return recorder.build(), CutResult.evaluate(graph, best_spins)


def sample_final_spins(
    graph: Graph,
    params: CimParams,
    n_trials: int,
    seed: SeedLike = None,
    schedule: Optional[ZeemanSchedule] = None,
) -> np.ndarray:
    """
    Final readouts of n_trials independent trials, one row per trial. Trial k
    draws from streams below derive_seed(seed, k), so it does not depend on n_trials.
    """
    if n_trials < 1:
        raise ParameterError(f"n_trials must be >= 1, got {n_trials}")
    coupling = build_coupling(graph, params)
    state = init_state(graph.n_vertices, seed, batch=n_trials, per_row=True)
    pattern, pattern_cycle = None, None
    for r in range(params.round_trips):
        field, pattern, pattern_cycle = _zeeman_field(
            schedule, r, state, pattern, pattern_cycle
        )
        state = step(state, coupling, params, field)
    return readout(state)


def sample_four_body_spins(
    j1234: float, params: CimParams, n_trials: int, seed: SeedLike = None
) -> np.ndarray:
    """Final readouts of n_trials independent four-body machines, streams as above"""
    if n_trials < 1:
        raise ParameterError(f"n_trials must be >= 1, got {n_trials}")
    state = init_state(4, seed, batch=n_trials, per_row=True)
    for _ in range(params.round_trips):
        state = four_body_step(state, j1234, params)
    return readout(state)


def spin_label(spins) -> str:
    """'+-+-' style label of one configuration"""
    return "".join("+" if x > 0 else "-" for x in spins)


def state_histogram(spins: np.ndarray) -> pd.DataFrame:
    """Occurrences of each final configuration (one row of spins per trial)"""
    labels = pd.Series([spin_label(row) for row in spins], name="state")
    counts = labels.value_counts().rename_axis("state").reset_index(name="count")
    counts["fraction"] = counts["count"] / len(labels)
    return counts.sort_values(
        ["count", "state"], ascending=[False, True], ignore_index=True
    )
