#!/usr/bin/env python3
"""
cimbench - Goemans-Williamson pipeline

The semidefinite relaxation max 1/2 sum_{i<j} w_ij (1 - v_i . v_j), |v_i| = 1, is
solved in low-rank (Burer-Monteiro) form by exact block-coordinate updates, then
rounded to spins with random hyperplanes. A spectral bound (N/4) lambda_max(L)
completes the certificate reported next to the relaxation value.

There is no primal-dual gap here. Convergence is judged on relative objective
stagnation and the first-order residual, with the spectral bound as a check.
"""

import math
import time
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from core import kernels
from core.graph import CutResult, Graph, energies_of_columns
from core.seeding import SeedLike, derive_seed
from exceptions import ConvergenceError, ParameterError, SolverError
from utils.logger import Logger, silent_logger

_UNIT_NORM_TOL = 1e-9
_ROUNDING_BLOCK = 1 << 22


@dataclass(frozen=True)
class GwConfig:
    """rank and n_hyperplanes default to ceil(sqrt(2N)) + 1 and N"""

    rank: Optional[int] = None
    max_sweeps: int = 1000
    tol: float = 1e-6
    n_hyperplanes: Optional[int] = None

    def __post_init__(self):
        if self.rank is not None and self.rank < 2:
            raise ParameterError(f"rank must be >= 2, got {self.rank}")
        if self.max_sweeps < 1:
            raise ParameterError(f"max_sweeps must be >= 1, got {self.max_sweeps}")
        if not self.tol > 0:
            raise ParameterError(f"tol must be > 0, got {self.tol}")
        if self.n_hyperplanes is not None and self.n_hyperplanes < 1:
            raise ParameterError(f"n_hyperplanes must be >= 1, got {self.n_hyperplanes}")

    def rank_for(self, n: int) -> int:
        if self.rank is None:
            return min(n, math.ceil(math.sqrt(2 * n)) + 1)
        if self.rank > n:
            raise ParameterError(f"rank {self.rank} exceeds the {n} vertices")
        return self.rank

    def hyperplanes_for(self, n: int) -> int:
        return n if self.n_hyperplanes is None else self.n_hyperplanes


@dataclass(frozen=True, eq=False)
class Relaxation:
    """Unit vectors (one row per vertex) and the relaxation value they reach"""

    vectors: np.ndarray
    objective: float
    grad_norm: float
    sweeps: int = 0
    trajectory: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        norms = np.linalg.norm(self.vectors, axis=1)
        if len(norms) and np.max(np.abs(norms - 1.0)) > _UNIT_NORM_TOL:
            raise SolverError("relaxation vectors must have unit norm")

    @property
    def rank(self) -> int:
        return self.vectors.shape[1]


def relaxation_objective(graph: Graph, vectors: np.ndarray) -> float:
    """1/2 (W - 1/2 tr(V^T A V)) with A the symmetric adjacency"""
    av = graph.adjacency @ vectors
    return 0.5 * (graph.total_weight - 0.5 * float(np.sum(vectors * av)))


def residual_norm(graph: Graph, vectors: np.ndarray) -> float:
    """Frobenius norm of the tangential part of u_i = sum_j w_ij v_j"""
    u = graph.adjacency @ vectors
    radial = np.sum(u * vectors, axis=1, keepdims=True)
    return float(np.linalg.norm(u - radial * vectors))


def _random_unit_vectors(rng: np.random.Generator, n: int, k: int) -> np.ndarray:
    v = rng.standard_normal((n, k))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def solve_relaxation(
    graph: Graph,
    config: Optional[GwConfig] = None,
    seed: SeedLike = None,
    logger: Optional[Logger] = None,
) -> Relaxation:
    """
    Cycle through the vertices setting v_i <- -u/|u| (the exact maximiser for v_i
    with the others fixed) until one sweep improves the objective by less than
    tol relative, or max_sweeps is reached.
    """
    config = config or GwConfig()
    logger = logger or silent_logger()
    n = graph.n_vertices
    rng = np.random.default_rng(seed)
    vectors = _random_unit_vectors(rng, n, config.rank_for(n))
    indptr, indices, data = graph.csr_arrays

    objective = relaxation_objective(graph, vectors)
    trajectory = [objective]
    sweeps = 0
    for sweeps in range(1, config.max_sweeps + 1):
        kernels.bm_sweep(indptr, indices, data, vectors)
        updated = relaxation_objective(graph, vectors)
        trajectory.append(updated)
        improvement = updated - objective
        objective = updated
        if abs(improvement) <= config.tol * abs(updated):
            break
    else:
        logger.warning(
            f"relaxation stopped at max_sweeps={config.max_sweeps} "
            f"(last improvement {improvement:.3g})"
        )

    # renormalise against rounding drift before the unit-norm check
    vectors /= np.linalg.norm(vectors, axis=1, keepdims=True)
    logger.debug(f"relaxation: {sweeps} sweeps, objective {objective:.6f}")
    return Relaxation(
        vectors=vectors,
        objective=relaxation_objective(graph, vectors),
        grad_norm=residual_norm(graph, vectors),
        sweeps=sweeps,
        trajectory=np.asarray(trajectory),
    )


def hyperplane_round(
    relaxation: Relaxation,
    graph: Graph,
    n_hyperplanes: Optional[int] = None,
    seed: SeedLike = None,
) -> CutResult:
    """Best of n_hyperplanes roundings s_i = sign(r . v_i), sign(0) = +1"""
    vectors = relaxation.vectors
    n, k = vectors.shape
    if n != graph.n_vertices:
        raise ParameterError(
            f"relaxation has {n} vectors, graph has {graph.n_vertices} vertices"
        )
    total = graph.n_vertices if n_hyperplanes is None else int(n_hyperplanes)
    if total < 1:
        raise ParameterError(f"n_hyperplanes must be >= 1, got {total}")

    rng = np.random.default_rng(seed)
    block = max(1, _ROUNDING_BLOCK // n)
    best_energy = np.inf
    best_spins = None
    for start in range(0, total, block):
        directions = rng.standard_normal((k, min(block, total - start)))
        spins = np.where(vectors @ directions >= 0, 1, -1).astype(np.int8)
        energies = energies_of_columns(graph, spins)
        j = int(np.argmin(energies))
        if energies[j] < best_energy:
            best_energy = energies[j]
            best_spins = spins[:, j].copy()
    return CutResult.evaluate(graph, best_spins)


def laplacian(graph: Graph) -> sp.csr_matrix:
    degrees = np.asarray(graph.adjacency.sum(axis=1)).ravel()
    return (sp.diags(degrees) - graph.adjacency).tocsr()


_DENSE_SPECTRUM_LIMIT = 400


def spectral_upper_bound(
    graph: Graph, tol: float = 0.0, max_iter: Optional[int] = None, seed: SeedLike = 0
) -> float:
    """
    (N/4) lambda_max(L): since cut(s) = s^T L s / 4 and |s|^2 = N.

    The top eigenpair comes from a dense solver for small graphs and from
    Lanczos (eigsh) otherwise. The Rayleigh quotient of a unit vector never
    exceeds lambda_max, so it is lifted by the residual norm |Lx - theta x|
    (an eigenvalue lies within it) plus a few ulps of |L|. The result stays
    an upper bound in floating point.
    """
    lap = laplacian(graph).tocsr()
    n = graph.n_vertices
    scale = float(np.max(np.asarray(abs(lap).sum(axis=1)).ravel())) if n else 0.0
    if scale == 0.0:
        return 0.0

    if n <= _DENSE_SPECTRUM_LIMIT:
        _, vectors = scipy.linalg.eigh(lap.toarray(), subset_by_index=[n - 1, n - 1])
    else:
        v0 = np.random.default_rng(seed).standard_normal(n)
        try:
            _, vectors = spla.eigsh(lap, k=1, which="LA", tol=tol, maxiter=max_iter, v0=v0)
        except spla.ArpackNoConvergence as exc:
            raise ConvergenceError(f"Lanczos did not converge for lambda_max: {exc}") from exc

    x = vectors[:, 0] / np.linalg.norm(vectors[:, 0])
    lx = lap @ x
    theta = float(x @ lx)
    residual = float(np.linalg.norm(lx - theta * x))
    lam = theta + residual + 8.0 * n * np.finfo(float).eps * scale
    return n / 4.0 * lam


@dataclass(frozen=True, eq=False)
class GwReport:
    """End-to-end result: rounded cut plus the certificate triple and timings"""

    cut: CutResult
    relaxation: Relaxation
    spectral_bound: float
    n_hyperplanes: int
    solve_seconds: float
    round_seconds: float

    @property
    def objective(self) -> float:
        return self.relaxation.objective

    @property
    def relative_gap(self) -> float:
        """1 - cut / relaxation objective"""
        return 1.0 - self.cut.cut_value / self.objective if self.objective else 0.0

    def summary(self) -> Dict[str, Any]:
        return {
            "method": "low-rank block-coordinate relaxation + hyperplane rounding",
            "rank": self.relaxation.rank,
            "sweeps": self.relaxation.sweeps,
            "objective": self.objective,
            "grad_norm": self.relaxation.grad_norm,
            "spectral_bound": self.spectral_bound,
            "cut": self.cut.cut_value,
            "ising_energy": self.cut.ising_energy,
            "relative_gap": self.relative_gap,
            "n_hyperplanes": self.n_hyperplanes,
            "solve_seconds": self.solve_seconds,
            "round_seconds": self.round_seconds,
        }

    def trajectory_frame(self) -> pd.DataFrame:
        values = self.relaxation.trajectory
        return pd.DataFrame({"sweep": np.arange(len(values)), "objective": values})


def gw_run(
    graph: Graph,
    config: Optional[GwConfig] = None,
    seed: SeedLike = None,
    logger: Optional[Logger] = None,
) -> GwReport:
    """solve_relaxation then hyperplane_round, each on its own seed stream"""
    config = config or GwConfig()
    logger = logger or silent_logger()

    start = time.perf_counter()
    relaxation = solve_relaxation(graph, config, derive_seed(seed, "solve"), logger)
    solved = time.perf_counter()
    n_hyperplanes = config.hyperplanes_for(graph.n_vertices)
    cut = hyperplane_round(relaxation, graph, n_hyperplanes, derive_seed(seed, "round"))
    rounded = time.perf_counter()

    bound = spectral_upper_bound(graph)
    if cut.cut_value > relaxation.objective + 1e-6 * max(1.0, abs(relaxation.objective)):
        logger.warning(
            f"rounded cut {cut.cut_value:g} exceeds relaxation objective "
            f"{relaxation.objective:g}; relaxation not converged"
        )
    return GwReport(
        cut=cut,
        relaxation=relaxation,
        spectral_bound=bound,
        n_hyperplanes=n_hyperplanes,
        solve_seconds=solved - start,
        round_seconds=rounded - solved,
    )
