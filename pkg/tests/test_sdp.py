import numpy as np
import pytest
from conftest import complete_unit, mixed_graph

from core.graph import Graph, brute_force_maxcut, gen_random_graph, gen_toroidal_grid
from core.sdp import (
    GwConfig,
    Relaxation,
    gw_run,
    hyperplane_round,
    laplacian,
    relaxation_objective,
    residual_norm,
    solve_relaxation,
    spectral_upper_bound,
)
from exceptions import ParameterError, SolverError

GW_RATIO = 0.87856


class TestConfig:
    def test_rank_rule(self):
        config = GwConfig()
        assert config.rank_for(100) == 16
        assert config.rank_for(3) == 3
        assert GwConfig(rank=5).rank_for(10) == 5
        with pytest.raises(ParameterError):
            GwConfig(rank=12).rank_for(10)

    def test_hyperplanes_default_to_n(self):
        assert GwConfig().hyperplanes_for(40) == 40
        assert GwConfig(n_hyperplanes=7).hyperplanes_for(40) == 7

    @pytest.mark.parametrize(
        "kwargs", [{"rank": 1}, {"max_sweeps": 0}, {"tol": 0.0}, {"n_hyperplanes": 0}]
    )
    def test_validation(self, kwargs):
        with pytest.raises(ParameterError):
            GwConfig(**kwargs)


class TestRelaxation:
    def test_k4_relaxation_is_tight(self, k4):
        relaxation = solve_relaxation(k4, seed=0)
        assert relaxation.objective == pytest.approx(4.0, abs=1e-3)
        assert relaxation.grad_norm < 1e-2
        np.testing.assert_allclose(np.linalg.norm(relaxation.vectors, axis=1), 1.0)

    def test_objective_formula(self, triangle):
        # three coplanar unit vectors 120 degrees apart: 3 * (1 + 1/2) / 2
        angles = np.array([0.0, 2 * np.pi / 3, 4 * np.pi / 3])
        vectors = np.column_stack([np.cos(angles), np.sin(angles)])
        assert relaxation_objective(triangle, vectors) == pytest.approx(2.25)
        assert residual_norm(triangle, vectors) == pytest.approx(0.0, abs=1e-12)

    def test_trajectory_is_non_decreasing(self):
        g = mixed_graph(30, 0.3, 1)
        relaxation = solve_relaxation(g, seed=2)
        assert relaxation.sweeps == len(relaxation.trajectory) - 1
        assert np.all(np.diff(relaxation.trajectory) >= -1e-9)

    def test_rejects_non_unit_vectors(self):
        with pytest.raises(SolverError):
            Relaxation(vectors=np.full((3, 2), 0.5), objective=0.0, grad_norm=0.0)

    @pytest.mark.parametrize("seed", range(5))
    def test_dominates_exact_optimum(self, seed):
        g = mixed_graph(12, 0.5, seed + 40)
        optimum = brute_force_maxcut(g).cut_value
        relaxation = solve_relaxation(g, seed=seed)
        assert relaxation.objective >= optimum - 1e-3 * max(1.0, abs(optimum))


class TestRounding:
    def test_cut_is_below_relaxation(self):
        g = gen_random_graph(40, 0.3, 5)
        relaxation = solve_relaxation(g, seed=0)
        cut = hyperplane_round(relaxation, g, seed=1)
        assert cut.cut_value <= relaxation.objective + 1e-6
        assert cut.cut_value >= GW_RATIO * relaxation.objective

    def test_single_hyperplane_is_a_valid_cut(self):
        g = gen_random_graph(30, 0.4, 6)
        relaxation = solve_relaxation(g, seed=0)
        cut = hyperplane_round(relaxation, g, n_hyperplanes=1, seed=3)
        assert set(np.unique(cut.spins)) <= {-1, 1}
        assert 0.0 <= cut.cut_value <= relaxation.objective + 1e-6

    def test_size_mismatch(self, k4):
        relaxation = solve_relaxation(k4, seed=0)
        with pytest.raises(ParameterError):
            hyperplane_round(relaxation, complete_unit(5))
        with pytest.raises(ParameterError):
            hyperplane_round(relaxation, k4, n_hyperplanes=0)


class TestSpectralBound:
    def test_laplacian_rows_sum_to_zero(self):
        lap = laplacian(mixed_graph(15, 0.4, 2))
        np.testing.assert_allclose(np.asarray(lap.sum(axis=1)).ravel(), 0.0, atol=1e-12)

    def test_complete_graph(self, k4):
        # lambda_max(L(K_n)) = n
        assert spectral_upper_bound(k4) == pytest.approx(4.0, rel=1e-4)

    def test_bipartite_torus_is_tight(self):
        g = gen_toroidal_grid(4, 6)
        assert spectral_upper_bound(g) == pytest.approx(48.0, rel=1e-4)

    def test_matches_dense_eigenvalue(self):
        g = mixed_graph(25, 0.3, 3)
        exact = 25 / 4 * np.linalg.eigvalsh(laplacian(g).toarray()).max()
        assert spectral_upper_bound(g) == pytest.approx(exact, rel=1e-3)

    def test_edgeless_graph(self):
        assert spectral_upper_bound(Graph.from_edges(6, [])) == 0.0

    @pytest.mark.parametrize("seed", range(5))
    def test_dominates_exact_optimum(self, seed):
        g = mixed_graph(12, 0.5, seed + 60)
        optimum = brute_force_maxcut(g).cut_value
        assert spectral_upper_bound(g) >= optimum

    def test_even_cycle_reaches_its_cut(self):
        # C_16 is bipartite: every edge can be cut and lambda_max = 4 exactly
        ring = Graph.from_edges(16, [(i, (i + 1) % 16, 1.0) for i in range(16)])
        bound = spectral_upper_bound(ring)
        assert bound >= 16.0
        assert bound == pytest.approx(16.0, rel=1e-9)

    @pytest.mark.parametrize("shape", [(4, 4), (8, 10), (24, 24)])
    def test_bipartite_torus_bound_covers_every_edge(self, shape):
        g = gen_toroidal_grid(*shape)
        assert spectral_upper_bound(g) >= g.total_weight

    def test_large_graph_uses_lanczos(self):
        g = gen_toroidal_grid(30, 30, seed=1, weights="pm1")
        dense = 900 / 4 * np.linalg.eigvalsh(laplacian(g).toarray()).max()
        bound = spectral_upper_bound(g)
        assert bound >= dense
        assert bound == pytest.approx(dense, rel=1e-6)


class TestPipeline:
    def test_gw_run_on_k4(self, k4):
        report = gw_run(k4, GwConfig(n_hyperplanes=64), seed=0)
        assert report.cut.cut_value == 4.0
        assert report.relative_gap == pytest.approx(0.0, abs=1e-3)
        assert report.spectral_bound == pytest.approx(4.0, rel=1e-4)
        assert report.n_hyperplanes == 64
        summary = report.summary()
        assert summary["cut"] == 4.0
        assert summary["rank"] == 4
        assert list(report.trajectory_frame().columns) == ["sweep", "objective"]

    def test_same_seed_same_report(self):
        g = gen_random_graph(30, 0.3, 9)
        a, b = gw_run(g, seed=4), gw_run(g, seed=4)
        assert a.objective == b.objective
        np.testing.assert_array_equal(a.cut.spins, b.cut.spins)

    def test_ratio_on_nonnegative_graphs(self):
        for seed in range(3):
            g = gen_random_graph(30, 0.3, seed)
            report = gw_run(g, seed=seed)
            assert report.cut.cut_value >= GW_RATIO * report.objective
