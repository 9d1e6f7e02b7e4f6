#!/usr/bin/env python3
"""
cimbench - Problem instances

Weighted undirected graphs, spin configurations, the G-set (rudy) text format,
objective evaluation and an exhaustive oracle for small instances.

Sign convention: the Ising couplings are J_ij = -w_ij, so
    H(s) = -sum_{i<j} J_ij s_i s_j = sum_{i<j} w_ij s_i s_j
    C(s) = sum_{i<j} w_ij (1 - s_i s_j) / 2 = W/2 - H/2
"""

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Iterator, List, Optional, TextIO, Tuple, Union

import numpy as np
import scipy.sparse as sp

from exceptions import GraphError, GsetParseError, OracleSizeError, ParameterError

Edge = Tuple[int, int, float]

MAX_ORACLE_VERTICES = 24
_ORACLE_BLOCK = 1 << 14
_INTEGRAL_TOL = 1e-6


def _readonly(array: np.ndarray) -> np.ndarray:
    array = np.ascontiguousarray(array)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected weighted graph stored as a flat edge list with i < j"""

    n_vertices: int
    heads: np.ndarray
    tails: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        n = int(self.n_vertices)
        if n < 1:
            raise GraphError(f"graph needs at least one vertex, got {n}")
        heads = np.asarray(self.heads, dtype=np.int64).reshape(-1)
        tails = np.asarray(self.tails, dtype=np.int64).reshape(-1)
        weights = np.asarray(self.weights, dtype=np.float64).reshape(-1)
        if not (len(heads) == len(tails) == len(weights)):
            raise GraphError("edge arrays have different lengths")
        if len(heads):
            if heads.min() < 0 or tails.max() >= n:
                raise GraphError(f"edge endpoint outside [0, {n})")
            if np.any(heads == tails):
                raise GraphError("self-loops are not allowed")
            if np.any(heads > tails):
                raise GraphError("edges must be stored with i < j")
            keys = heads * n + tails
            if len(np.unique(keys)) != len(keys):
                raise GraphError("duplicate edges are not allowed")
            if not np.all(np.isfinite(weights)):
                raise GraphError("edge weights must be finite")
        object.__setattr__(self, "n_vertices", n)
        object.__setattr__(self, "heads", _readonly(heads))
        object.__setattr__(self, "tails", _readonly(tails))
        object.__setattr__(self, "weights", _readonly(weights))

    @classmethod
    def from_edges(cls, n_vertices: int, edges: Iterable[Edge]) -> "Graph":
        """Build from (i, j, w) triples in any endpoint order"""
        triples = list(edges)
        if not triples:
            empty = np.zeros(0)
            return cls(n_vertices, empty, empty, empty)
        arr = np.asarray(triples, dtype=np.float64)
        i = arr[:, 0].astype(np.int64)
        j = arr[:, 1].astype(np.int64)
        return cls(n_vertices, np.minimum(i, j), np.maximum(i, j), arr[:, 2])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n_vertices == other.n_vertices
            and np.array_equal(self.heads, other.heads)
            and np.array_equal(self.tails, other.tails)
            and np.array_equal(self.weights, other.weights)
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"Graph(N={self.n_vertices}, m={self.n_edges})"

    @property
    def n_edges(self) -> int:
        return int(len(self.weights))

    @property
    def average_degree(self) -> float:
        return 2.0 * self.n_edges / self.n_vertices

    @cached_property
    def total_weight(self) -> float:
        return float(self.weights.sum())

    @cached_property
    def negative_weight(self) -> float:
        """E_neg: total |w| over negative edges (the count for +-1 weights)"""
        return float(-self.weights[self.weights < 0].sum())

    @cached_property
    def is_integral(self) -> bool:
        return bool(np.all(self.weights == np.round(self.weights)))

    @property
    def is_dense(self) -> bool:
        pairs = self.n_vertices * (self.n_vertices - 1) / 2
        return pairs > 0 and self.n_edges >= 0.25 * pairs

    @cached_property
    def abs_row_sums(self) -> np.ndarray:
        """sum_j |w_ij| for every vertex"""
        w = np.abs(self.weights)
        n = self.n_vertices
        sums = np.bincount(self.heads, weights=w, minlength=n)
        sums += np.bincount(self.tails, weights=w, minlength=n)
        return _readonly(sums)

    @cached_property
    def adjacency(self) -> sp.csr_matrix:
        """Symmetric weighted adjacency matrix, compressed rows"""
        n = self.n_vertices
        rows = np.concatenate([self.heads, self.tails])
        cols = np.concatenate([self.tails, self.heads])
        data = np.concatenate([self.weights, self.weights])
        matrix = sp.csr_matrix((data, (rows, cols)), shape=(n, n))
        matrix.sort_indices()
        return matrix

    @cached_property
    def csr_arrays(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(indptr, indices, data) of the adjacency, typed for the numba kernels"""
        adj = self.adjacency
        return (
            np.ascontiguousarray(adj.indptr, dtype=np.int64),
            np.ascontiguousarray(adj.indices, dtype=np.int64),
            np.ascontiguousarray(adj.data, dtype=np.float64),
        )

    def edge_list(self) -> List[Edge]:
        return [
            (int(i), int(j), float(w))
            for i, j, w in zip(self.heads, self.tails, self.weights)
        ]


@dataclass(frozen=True, eq=False)
class CutResult:
    """A spin configuration together with its cut value and Ising energy"""

    cut_value: float
    ising_energy: float
    spins: np.ndarray

    @classmethod
    def evaluate(cls, graph: Graph, spins) -> "CutResult":
        s = as_spins(spins, graph.n_vertices)
        cut = cut_value(graph, s)
        if graph.is_integral and abs(cut - round(cut)) > _INTEGRAL_TOL:
            raise GraphError(f"non-integral cut {cut} on an integer-weighted graph")
        return cls(cut, ising_energy(graph, s), _readonly(s.copy()))


def as_spins(spins, n_vertices: int) -> np.ndarray:
    """Validate a +-1 vector of length N and return it as int8"""
    s = np.asarray(spins)
    if s.shape != (n_vertices,):
        raise GraphError(
            f"spin vector has shape {s.shape}, graph has {n_vertices} vertices"
        )
    if not np.all((s == 1) | (s == -1)):
        raise GraphError("spins must be exactly +1 or -1")
    return s.astype(np.int8)


def cut_value(graph: Graph, spins) -> float:
    """C(s) = sum over edges of w_ij (1 - s_i s_j) / 2"""
    s = as_spins(spins, graph.n_vertices).astype(np.float64)
    crossing = 1.0 - s[graph.heads] * s[graph.tails]
    return float(np.dot(graph.weights, crossing) / 2.0)


def ising_energy(graph: Graph, spins) -> float:
    """H(s) = sum over edges of w_ij s_i s_j"""
    s = as_spins(spins, graph.n_vertices).astype(np.float64)
    return float(np.dot(graph.weights, s[graph.heads] * s[graph.tails]))


def energies_of_columns(graph: Graph, spin_matrix: np.ndarray) -> np.ndarray:
    """Ising energy of every column of an (N, k) matrix of +-1 spins"""
    s = np.asarray(spin_matrix, dtype=np.float64)
    return 0.5 * np.einsum("ik,ik->k", s, graph.adjacency @ s)


def energy_to_cut(graph: Graph, energy: float) -> float:
    return 0.5 * graph.total_weight - 0.5 * energy


def cut_to_energy(graph: Graph, cut: float) -> float:
    return graph.total_weight - 2.0 * cut


def normalized_score(cut: float, u_sdp: float, e_neg: float) -> float:
    """(C + E_neg) / (U_SDP + E_neg)"""
    denominator = u_sdp + e_neg
    if denominator <= 0:
        raise ParameterError(
            f"normalization denominator U_SDP + E_neg = {denominator} is not positive"
        )
    return (cut + e_neg) / denominator


# --- G-set (rudy) text format -----------------------------------------------


def _parse_int(token: str, what: str, line_number: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise GsetParseError(f"invalid {what} {token!r}", line_number) from None


def parse_gset(text: Union[str, TextIO]) -> Graph:
    """Parse 'N m' followed by m lines 'i j w' with 1-based vertex indices"""
    content = text if isinstance(text, str) else text.read()
    lines = content.splitlines()

    numbered = [(k + 1, line.split()) for k, line in enumerate(lines) if line.strip()]
    if not numbered:
        raise GsetParseError("empty input: missing 'N m' header", 1)

    header_line, header = numbered[0]
    if len(header) != 2:
        raise GsetParseError("malformed header, expected 'N m'", header_line)
    n = _parse_int(header[0], "vertex count", header_line)
    m = _parse_int(header[1], "edge count", header_line)
    if n < 1 or m < 0:
        raise GsetParseError(f"malformed header 'N={n} m={m}'", header_line)

    body = numbered[1:]
    if len(body) > m:
        raise GsetParseError(f"more than {m} edge lines", body[m][0])
    if len(body) < m:
        last = numbered[-1][0]
        raise GsetParseError(f"expected {m} edge lines, found {len(body)}", last)

    heads = np.empty(m, dtype=np.int64)
    tails = np.empty(m, dtype=np.int64)
    weights = np.empty(m, dtype=np.float64)
    seen = {}
    for k, (line_number, tokens) in enumerate(body):
        if len(tokens) != 3:
            raise GsetParseError("malformed edge line, expected 'i j w'", line_number)
        i = _parse_int(tokens[0], "vertex index", line_number)
        j = _parse_int(tokens[1], "vertex index", line_number)
        try:
            w = float(tokens[2])
        except ValueError:
            raise GsetParseError(f"invalid weight {tokens[2]!r}", line_number) from None
        for v in (i, j):
            if not 1 <= v <= n:
                raise GsetParseError(
                    f"vertex index {v} out of range [1, {n}]", line_number
                )
        if i == j:
            raise GsetParseError("self-loop", line_number)
        key = (min(i, j), max(i, j))
        if key in seen:
            raise GsetParseError(
                f"duplicate edge {key} (first at line {seen[key]})", line_number
            )
        seen[key] = line_number
        heads[k], tails[k], weights[k] = key[0] - 1, key[1] - 1, w

    return Graph(n, heads, tails, weights)


def _format_weight(w: float) -> str:
    if float(w).is_integer():
        return str(int(w))
    return repr(float(w))


def write_gset(graph: Graph) -> str:
    """Inverse of parse_gset; weights are written so they parse back exactly"""
    out = [f"{graph.n_vertices} {graph.n_edges}"]
    out.extend(
        f"{i + 1} {j + 1} {_format_weight(w)}"
        for i, j, w in zip(graph.heads.tolist(), graph.tails.tolist(), graph.weights)
    )
    return "\n".join(out) + "\n"


def load_gset(path: Path) -> Graph:
    with Path(path).open(encoding="utf-8") as f:
        return parse_gset(f)


def save_gset(graph: Graph, path: Path) -> None:
    Path(path).write_text(write_gset(graph), encoding="utf-8")


# --- Generators --------------------------------------------------------------


def _draw_weights(rng: np.random.Generator, count: int, weights: str) -> np.ndarray:
    if weights == "unit":
        return np.ones(count)
    if weights == "pm1":
        return rng.choice(np.array([-1.0, 1.0]), size=count)
    raise ParameterError(f"unknown weight distribution {weights!r} (unit, pm1)")


def gen_complete_pm1(n: int, seed: int) -> Graph:
    """K_n with independent +-1 weights"""
    if n < 2:
        raise ParameterError(f"complete graph needs n >= 2, got {n}")
    heads, tails = np.triu_indices(n, k=1)
    rng = np.random.default_rng(seed)
    return Graph(n, heads, tails, _draw_weights(rng, len(heads), "pm1"))


def gen_random_graph(
    n: int, density: float, seed: int, weights: str = "unit"
) -> Graph:
    """G(n, p) random graph with unit or +-1 weights"""
    if n < 1:
        raise ParameterError(f"random graph needs n >= 1, got {n}")
    if not 0.0 <= density <= 1.0:
        raise ParameterError(f"density must lie in [0, 1], got {density}")
    heads, tails = np.triu_indices(n, k=1)
    rng = np.random.default_rng(seed)
    keep = rng.random(len(heads)) < density
    heads, tails = heads[keep], tails[keep]
    return Graph(n, heads, tails, _draw_weights(rng, len(heads), weights))


def gen_toroidal_grid(
    rows: int, cols: int, seed: Optional[int] = None, weights: str = "unit"
) -> Graph:
    """rows x cols grid with wrap-around edges in both directions"""
    if rows < 3 or cols < 3:
        raise ParameterError(f"toroidal grid needs rows, cols >= 3, got {rows}x{cols}")
    r, c = np.divmod(np.arange(rows * cols), cols)
    right = r * cols + (c + 1) % cols
    down = ((r + 1) % rows) * cols + c
    v = np.arange(rows * cols)
    i = np.concatenate([v, v])
    j = np.concatenate([right, down])
    rng = np.random.default_rng(seed)
    return Graph(
        rows * cols,
        np.minimum(i, j),
        np.maximum(i, j),
        _draw_weights(rng, len(i), weights),
    )


# --- Exact oracle ------------------------------------------------------------


def _check_oracle_size(graph: Graph) -> None:
    if graph.n_vertices > MAX_ORACLE_VERTICES:
        raise OracleSizeError(
            f"exhaustive search limited to N <= {MAX_ORACLE_VERTICES}, "
            f"got N={graph.n_vertices}"
        )


def _spin_block(codes: np.ndarray, n: int) -> np.ndarray:
    # vertex 0 is pinned to +1; bit k of the code is vertex k+1 (1 -> spin -1)
    bits = (codes[:, None] >> np.arange(n - 1, dtype=np.int64)) & 1
    spins = np.ones((len(codes), n), dtype=np.int8)
    spins[:, 1:] = 1 - 2 * bits
    return spins


def _enumerate_energies(graph: Graph) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
    n = graph.n_vertices
    total = 1 << (n - 1)
    w = graph.weights
    for start in range(0, total, _ORACLE_BLOCK):
        codes = np.arange(start, min(total, start + _ORACLE_BLOCK), dtype=np.int64)
        spins = _spin_block(codes, n)
        s = spins.astype(np.float64)
        energies = (s[:, graph.heads] * s[:, graph.tails]) @ w
        yield spins, energies


def brute_force_maxcut(graph: Graph) -> CutResult:
    """Exact maximum cut over all 2^(N-1) bipartitions"""
    _check_oracle_size(graph)
    best_energy = np.inf
    best_spins = None
    for spins, energies in _enumerate_energies(graph):
        k = int(np.argmin(energies))
        if energies[k] < best_energy:
            best_energy = energies[k]
            best_spins = spins[k].copy()
    return CutResult.evaluate(graph, best_spins)


def ground_states(graph: Graph, tol: float = 1e-9) -> np.ndarray:
    """All minimum-energy configurations, global flips included, one per row"""
    _check_oracle_size(graph)
    best_energy = np.inf
    found: List[np.ndarray] = []
    for spins, energies in _enumerate_energies(graph):
        block_min = energies.min()
        slack = tol * max(1.0, abs(block_min))
        if block_min < best_energy - slack:
            best_energy = block_min
            found = []
        slack = tol * max(1.0, abs(best_energy))
        found.append(spins[energies <= best_energy + slack])
    optimal = np.concatenate(found, axis=0)
    return np.concatenate([optimal, -optimal], axis=0)
