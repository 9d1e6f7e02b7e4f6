import io

import numpy as np
import pytest
from conftest import complete_unit, mixed_graph

from core.graph import (
    CutResult,
    Graph,
    as_spins,
    brute_force_maxcut,
    cut_to_energy,
    cut_value,
    energies_of_columns,
    energy_to_cut,
    gen_complete_pm1,
    gen_random_graph,
    gen_toroidal_grid,
    ground_states,
    ising_energy,
    load_gset,
    normalized_score,
    parse_gset,
    save_gset,
    write_gset,
)
from exceptions import GraphError, GsetParseError, OracleSizeError, ParameterError


class TestGraph:
    def test_from_edges_orders_endpoints(self):
        g = Graph.from_edges(3, [(2, 0, 1.5), (1, 2, -2.0)])
        assert g.heads.tolist() == [0, 1]
        assert g.tails.tolist() == [2, 2]
        assert g.n_edges == 2
        assert g.total_weight == pytest.approx(-0.5)
        assert g.negative_weight == pytest.approx(2.0)

    @pytest.mark.parametrize(
        "edges",
        [
            [(0, 0, 1.0)],
            [(0, 5, 1.0)],
            [(0, 1, 1.0), (1, 0, 2.0)],
            [(0, 1, np.inf)],
        ],
        ids=["self-loop", "out-of-range", "duplicate", "non-finite"],
    )
    def test_rejects_invalid_edges(self, edges):
        with pytest.raises(GraphError):
            Graph.from_edges(3, edges)

    def test_arrays_are_read_only(self, k4):
        with pytest.raises(ValueError):
            k4.weights[0] = 5.0

    def test_equality_compares_contents(self):
        assert complete_unit(4) == complete_unit(4)
        assert complete_unit(4) != complete_unit(5)

    def test_adjacency_is_symmetric(self):
        g = mixed_graph(12, 0.5, 1)
        dense = g.adjacency.toarray()
        np.testing.assert_array_equal(dense, dense.T)
        assert dense[g.heads[0], g.tails[0]] == g.weights[0]

    def test_density_and_degree(self, k4):
        assert k4.is_dense
        assert k4.average_degree == 3.0
        ring = Graph.from_edges(20, [(i, (i + 1) % 20, 1.0) for i in range(20)])
        assert not ring.is_dense
        np.testing.assert_array_equal(ring.abs_row_sums, np.full(20, 2.0))


class TestObjective:
    def test_k4_two_two_split(self, k4):
        spins = [1, 1, -1, -1]
        assert cut_value(k4, spins) == 4.0
        assert ising_energy(k4, spins) == -2.0

    def test_cut_energy_identity(self):
        # C + H/2 = W/2 on many random (graph, spins) pairs
        rng = np.random.default_rng(5)
        for seed in range(100):
            g = mixed_graph(int(rng.integers(2, 30)), float(rng.uniform(0.1, 1.0)), seed)
            spins = rng.choice([-1, 1], size=(g.n_vertices, 100))
            energies = energies_of_columns(g, spins)
            s = spins.astype(float)
            cuts = 0.5 * (g.weights @ (1.0 - s[g.heads] * s[g.tails]))
            scale = max(1.0, 0.5 * np.abs(g.weights).sum())
            np.testing.assert_allclose(
                cuts + 0.5 * energies, 0.5 * g.total_weight, atol=1e-9 * scale
            )

    def test_energies_of_columns_matches_single(self):
        g = mixed_graph(10, 0.6, 2)
        spins = np.random.default_rng(0).choice([-1, 1], size=(10, 7))
        expected = [ising_energy(g, spins[:, k]) for k in range(7)]
        np.testing.assert_allclose(energies_of_columns(g, spins), expected)

    def test_energy_cut_conversions(self):
        g = mixed_graph(9, 0.5, 3)
        spins = np.ones(9, dtype=int)
        spins[::2] = -1
        assert energy_to_cut(g, ising_energy(g, spins)) == pytest.approx(cut_value(g, spins))
        assert cut_to_energy(g, cut_value(g, spins)) == pytest.approx(ising_energy(g, spins))

    def test_normalized_score(self):
        assert normalized_score(600.0, 629.0, 0.0) == pytest.approx(600 / 629)
        assert normalized_score(10.0, 20.0, 5.0) == pytest.approx(15 / 25)
        with pytest.raises(ParameterError):
            normalized_score(1.0, -5.0, 5.0)

    @pytest.mark.parametrize("spins", [[1, 0, 1, 1], [1, 1, 1], [[1, 1], [1, 1]]])
    def test_as_spins_rejects(self, spins):
        with pytest.raises(GraphError):
            as_spins(spins, 4)

    def test_cut_result_evaluate(self, k4):
        result = CutResult.evaluate(k4, [1, -1, 1, -1])
        assert result.cut_value == 4.0
        assert result.ising_energy == -2.0
        assert result.spins.dtype == np.int8


class TestGset:
    TEXT = "4 3\n1 2 1\n2 3 -1\n3 4 2.5\n"

    def test_parse(self):
        g = parse_gset(self.TEXT)
        assert g.n_vertices == 4
        assert g.edge_list() == [(0, 1, 1.0), (1, 2, -1.0), (2, 3, 2.5)]

    def test_parse_file_object_and_blank_lines(self):
        g = parse_gset(io.StringIO("3 2\n\n1 2 1\n\n3 2 1\n"))
        assert g.edge_list() == [(0, 1, 1.0), (1, 2, 1.0)]

    @pytest.mark.parametrize(
        "text, line, fragment",
        [
            ("3 2\n1 2 1\n2 2 1\n", 3, "self-loop"),
            ("3 1\n1 4 1\n", 2, "out of range [1, 3]"),
            ("3 2\n1 2 1\n2 1 3\n", 3, "duplicate edge"),
            ("3 2\n1 2 1\n", 2, "expected 2 edge lines"),
            ("3 1\n1 2 1\n2 3 1\n", 3, "more than 1 edge lines"),
            ("3\n1 2 1\n", 1, "malformed header"),
            ("3 1\n1 2\n", 2, "malformed edge line"),
            ("3 1\n1 2 x\n", 2, "invalid weight"),
            ("", 1, "empty input"),
        ],
    )
    def test_parse_errors_name_the_line(self, text, line, fragment):
        with pytest.raises(GsetParseError) as info:
            parse_gset(text)
        assert info.value.line_number == line
        assert fragment in str(info.value)
        assert f"at line {line}" in str(info.value)

    def test_write_then_parse(self):
        g = Graph.from_edges(5, [(0, 1, 1.0), (1, 4, -0.1), (2, 3, 1e-3)])
        text = write_gset(g)
        assert text.splitlines()[0] == "5 3"
        assert text.splitlines()[1] == "1 2 1"
        assert text.endswith("\n")
        assert parse_gset(text) == g

    def test_save_and_load(self, tmp_path):
        g = gen_complete_pm1(12, 4)
        path = tmp_path / "K12.txt"
        save_gset(g, path)
        assert load_gset(path) == g


class TestGenerators:
    def test_complete_pm1(self):
        g = gen_complete_pm1(30, 7)
        assert g.n_edges == 30 * 29 // 2
        assert set(np.unique(g.weights)) == {-1.0, 1.0}
        assert g == gen_complete_pm1(30, 7)
        assert g != gen_complete_pm1(30, 8)

    def test_random_graph_density_limits(self):
        assert gen_random_graph(20, 0.0, 1).n_edges == 0
        assert gen_random_graph(20, 1.0, 1).n_edges == 190
        with pytest.raises(ParameterError):
            gen_random_graph(20, 1.5, 1)
        with pytest.raises(ParameterError):
            gen_random_graph(20, 0.5, 1, weights="gaussian")

    def test_random_graph_pm1_weights(self):
        g = gen_random_graph(40, 0.3, 2, weights="pm1")
        assert set(np.unique(g.weights)) <= {-1.0, 1.0}
        assert g.negative_weight > 0

    def test_toroidal_grid_is_four_regular(self):
        g = gen_toroidal_grid(60, 50)
        assert g.n_vertices == 3000
        assert g.n_edges == 6000
        degrees = np.bincount(np.concatenate([g.heads, g.tails]))
        assert np.all(degrees == 4)

    def test_even_torus_is_fully_cut_by_checkerboard(self):
        rows, cols = 4, 6
        g = gen_toroidal_grid(rows, cols)
        r, c = np.divmod(np.arange(rows * cols), cols)
        spins = np.where((r + c) % 2 == 0, 1, -1)
        assert cut_value(g, spins) == g.n_edges == 48

    def test_toroidal_grid_needs_three_rows(self):
        with pytest.raises(ParameterError):
            gen_toroidal_grid(2, 5)


class TestOracle:
    def test_known_optima(self, k4, triangle, weighted_path):
        assert brute_force_maxcut(k4).cut_value == 4.0
        assert brute_force_maxcut(triangle).cut_value == 2.0
        assert brute_force_maxcut(weighted_path).cut_value == 6.0

    def test_ground_states_of_k4(self, k4):
        states = ground_states(k4)
        assert states.shape == (6, 4)
        assert len({tuple(row) for row in states}) == 6
        for row in states:
            assert cut_value(k4, row) == 4.0
            assert row.sum() == 0

    def test_ground_states_include_global_flip(self, triangle):
        states = {tuple(row) for row in ground_states(triangle)}
        assert len(states) == 6
        assert all(tuple(-np.array(s)) in states for s in states)

    def test_oracle_agrees_with_ground_states(self):
        g = mixed_graph(11, 0.6, 9)
        best = brute_force_maxcut(g)
        for row in ground_states(g):
            assert ising_energy(g, row) == pytest.approx(best.ising_energy)

    def test_oracle_size_limit(self):
        with pytest.raises(OracleSizeError):
            brute_force_maxcut(gen_random_graph(25, 0.2, 0))
