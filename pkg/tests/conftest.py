"""Shared fixtures: small graphs with known optima and an isolated runtime config"""

from itertools import combinations

import numpy as np
import pytest

from config import Config
from core.graph import Graph, gen_random_graph
from utils.logger import silent_logger


def complete_unit(n: int) -> Graph:
    return Graph.from_edges(n, [(i, j, 1.0) for i, j in combinations(range(n), 2)])


def mixed_graph(n: int, density: float, seed: int) -> Graph:
    """Random graph with integer weights in {-3..3} minus zero"""
    base = gen_random_graph(n, density, seed)
    rng = np.random.default_rng(seed + 10_000)
    weights = rng.choice(np.array([-3.0, -2.0, -1.0, 1.0, 2.0, 3.0]), size=base.n_edges)
    return Graph(n, base.heads, base.tails, weights)


@pytest.fixture
def k4() -> Graph:
    return complete_unit(4)


@pytest.fixture
def triangle() -> Graph:
    return complete_unit(3)


@pytest.fixture
def weighted_path() -> Graph:
    # tree: every edge can be cut, optimum 1 + 2 + 3
    return Graph.from_edges(4, [(0, 1, 1.0), (1, 2, 2.0), (2, 3, 3.0)])


@pytest.fixture
def logger():
    return silent_logger()


@pytest.fixture
def config(tmp_path) -> Config:
    return Config(
        cache_dir=tmp_path / "cache",
        out_dir=tmp_path / "results",
        workers=1,
    )
