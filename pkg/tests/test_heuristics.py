import math
import time
from itertools import product

import numpy as np
import pytest
from conftest import complete_unit, mixed_graph

from core.graph import (
    Graph,
    brute_force_maxcut,
    gen_random_graph,
    gen_toroidal_grid,
    ising_energy,
)
from core.heuristics import (
    BlsConfig,
    C0Rule,
    GainTable,
    SaSchedule,
    ScheduleKind,
    _best_pair,
    bls_run,
    initial_temperature,
    log_temperature,
    metropolis_accept,
    metropolis_samples,
    restart_descent_run,
    sa_run,
    sg3_run,
    steepest_descent,
)
from exceptions import ParameterError


class TestTemperature:
    def test_initial_temperature_rules(self, k4):
        assert initial_temperature(k4) == 3.0
        assert initial_temperature(k4, C0Rule.RMS_FIELD) == pytest.approx(math.sqrt(3.0))
        assert initial_temperature(Graph.from_edges(5, [])) == 1.0
        with pytest.raises(ParameterError):
            initial_temperature(k4, "median")

    def test_log_temperature(self):
        schedule = SaSchedule(c0=2.0, total_flips=100)
        assert log_temperature(0, schedule) == pytest.approx(2.0 / math.log(2.0))
        assert log_temperature(98, schedule) == pytest.approx(2.0 / math.log(100.0))
        with pytest.raises(ParameterError):
            log_temperature(-1, schedule)

    def test_constant_schedule(self):
        schedule = SaSchedule(c0=0.7, total_flips=10, schedule_kind=ScheduleKind.CONSTANT)
        np.testing.assert_array_equal(schedule.temperatures(5, 3), [0.7, 0.7, 0.7])

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"c0": 0.0, "total_flips": 10},
            {"c0": 1.0, "total_flips": 0},
            {"c0": 1.0, "total_flips": 10, "schedule_kind": "geometric"},
            {"c0": 1.0, "total_flips": 10, "sample_every": 0},
            {"c0": 1.0, "total_flips": 10, "flips_per_step": 0},
        ],
    )
    def test_schedule_validation(self, kwargs):
        with pytest.raises(ParameterError):
            SaSchedule(**kwargs)

    def test_metropolis_accept(self):
        rng = np.random.default_rng(0)
        assert metropolis_accept(-1.0, 0.5, rng)
        assert metropolis_accept(0.0, 0.5, rng)
        assert not metropolis_accept(1000.0, 0.5, rng)
        with pytest.raises(ParameterError):
            metropolis_accept(1.0, 0.0, rng)


    def test_uphill_acceptance_rate(self):
        # dE equal to the temperature is accepted with probability 1/e
        rng = np.random.default_rng(11)
        rate = np.mean([metropolis_accept(0.8, 0.8, rng) for _ in range(100_000)])
        assert rate == pytest.approx(math.exp(-1.0), abs=0.01)


class TestGainTable:
    def test_gains_match_energy_differences(self):
        g = mixed_graph(14, 0.5, 1)
        spins = np.random.default_rng(2).choice([-1, 1], size=14)
        table = GainTable(g, spins)
        base = ising_energy(g, spins)
        assert table.energy == pytest.approx(base)
        for v in range(14):
            flipped = spins.copy()
            flipped[v] *= -1
            assert table.delta(v) == pytest.approx(ising_energy(g, flipped) - base)

    def test_incremental_updates_stay_exact(self):
        g = mixed_graph(20, 0.3, 4)
        rng = np.random.default_rng(5)
        table = GainTable(g, rng.choice([-1, 1], size=20))
        for v in rng.integers(0, 20, size=200):
            before = table.energy
            expected = table.delta(v)
            assert table.flip(v) == pytest.approx(expected)
            assert table.energy == pytest.approx(before + expected)
        np.testing.assert_allclose(table.gains, table.recompute())

    def test_descend_respects_locks_and_cap(self):
        g = mixed_graph(16, 0.5, 6)
        spins = np.ones(16, dtype=np.int8)
        locked = np.zeros(16, dtype=bool)
        locked[:8] = True
        table = GainTable(g, spins)
        _, flips = table.descend(locked, max_flips=2)
        assert flips <= 2
        assert np.all(table.spins[:8] == 1)


class TestLocalSearch:
    def test_steepest_descent_is_one_flip_optimal(self):
        g = mixed_graph(30, 0.3, 7)
        start = np.random.default_rng(0).choice([-1, 1], size=30)
        result = steepest_descent(g, start)
        assert np.all(GainTable(g, result.spins).gains >= -1e-9)
        assert result.ising_energy <= ising_energy(g, start)

    def test_sg3_is_deterministic_and_cuts_half(self):
        g = gen_random_graph(60, 0.2, 3)
        first, second = sg3_run(g), sg3_run(g)
        np.testing.assert_array_equal(first.spins, second.spins)
        assert first.cut_value >= 0.5 * g.total_weight

    def test_sg3_small_optima(self, k4, weighted_path):
        assert sg3_run(k4).cut_value == 4.0
        assert sg3_run(weighted_path).cut_value == 6.0

    @pytest.mark.parametrize("seed", range(4))
    def test_sg3_matches_plain_scan(self, seed):
        g = mixed_graph(40, 0.3, seed + 40)
        heads, tails, weights = g.heads, g.tails, g.weights
        n = g.n_vertices
        w = np.zeros((n, n))
        w[heads, tails] = weights
        w[tails, heads] = weights
        k = int(np.argmax(weights))
        spins = np.ones(n, dtype=np.int8)
        spins[tails[k]] = -1
        placed = {int(heads[k]), int(tails[k])}
        while len(placed) < n:
            side_one = [v for v in placed if spins[v] == 1]
            side_two = [v for v in placed if spins[v] == -1]
            scores = [
                (-abs(w[i, side_one].sum() - w[i, side_two].sum()), i)
                for i in range(n)
                if i not in placed
            ]
            pick = min(scores)[1]
            spins[pick] = 1 if w[pick, side_two].sum() >= w[pick, side_one].sum() else -1
            placed.add(pick)
        np.testing.assert_array_equal(sg3_run(g).spins, spins)

    @pytest.mark.slow
    def test_sg3_work_follows_edge_count(self):
        # fixed N, doubling m: runtime slope on log-log close to 1
        edges, seconds = [], []
        for density in (0.01, 0.02, 0.04, 0.08):
            g = gen_random_graph(3000, density, seed=1)
            sg3_run(g)
            best = math.inf
            for _ in range(5):
                start = time.perf_counter()
                sg3_run(g)
                best = min(best, time.perf_counter() - start)
            edges.append(g.n_edges)
            seconds.append(best)
        slope = np.polyfit(np.log(edges), np.log(seconds), 1)[0]
        assert 0.7 <= slope <= 1.3

    def test_sg3_without_edges(self):
        result = sg3_run(Graph.from_edges(4, []))
        assert result.cut_value == 0.0
        assert np.all(result.spins == 1)

    def test_best_pair_is_least_harmful_edge_flip(self):
        g = mixed_graph(10, 0.5, 8)
        spins = np.random.default_rng(1).choice([-1, 1], size=10)
        table = GainTable(g, spins)
        base = ising_energy(g, spins)

        def pair_delta(h, t):
            flipped = spins.copy()
            flipped[[h, t]] *= -1
            return ising_energy(g, flipped) - base

        h, t = _best_pair(g, table)
        best = min(pair_delta(a, b) for a, b, _ in g.edge_list())
        assert pair_delta(h, t) == pytest.approx(best)


class TestSimulatedAnnealing:
    def test_trace_shape(self):
        g = mixed_graph(12, 0.5, 1)
        schedule = SaSchedule.for_graph(g, total_flips=1000)
        trace, result = sa_run(g, schedule, seed=3)
        assert trace.work[0] == 0
        assert trace.total_work == 1000
        assert trace.work_unit == "flips"
        assert trace.time_base == "wall-clock"
        assert np.all(np.diff(trace.best_energy) <= 0)
        assert result.ising_energy == pytest.approx(trace.final_best)

    def test_reproducible_for_a_seed(self):
        g = mixed_graph(15, 0.4, 2)
        schedule = SaSchedule.for_graph(g, total_flips=3000)
        a, ra = sa_run(g, schedule, seed=9)
        b, rb = sa_run(g, schedule, seed=9)
        np.testing.assert_array_equal(a.best_energy, b.best_energy)
        np.testing.assert_array_equal(ra.spins, rb.spins)

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_matches_oracle_on_small_graphs(self, seed):
        g = mixed_graph(10, 0.6, seed)
        schedule = SaSchedule.for_graph(g, total_flips=200_000)
        _, result = sa_run(g, schedule, seed=seed)
        assert result.cut_value == brute_force_maxcut(g).cut_value

    def test_stop_energy(self):
        g = mixed_graph(12, 0.5, 4)
        schedule = SaSchedule(c0=1.0, total_flips=10_000, sample_every=100)
        trace, _ = sa_run(g, schedule, seed=0, stop_energy=math.inf)
        assert len(trace) == 2
        assert trace.total_work == 1

    def test_stops_on_the_reaching_proposal(self):
        g = mixed_graph(30, 0.4, 6)
        schedule = SaSchedule.for_graph(g, total_flips=100_000)
        start = sa_run(g, schedule, seed=4, flip_budget=1)[0].best_energy[0]
        trace, result = sa_run(g, schedule, seed=4, stop_energy=start - 1.0)
        assert len(trace) == 2
        assert trace.total_work < 5_000
        assert result.ising_energy <= start - 1.0

    def test_sweep_schedule_holds_temperature_per_step(self):
        g = complete_unit(8)
        schedule = SaSchedule.for_graph(g, total_flips=80, c0_rule=C0Rule.RMS_FIELD, per_sweep=True)
        assert schedule.flips_per_step == 8
        temps = schedule.temperatures(0, 24)
        assert np.all(temps[:8] == temps[0])
        assert temps[8] == pytest.approx(math.sqrt(7.0) / math.log(3.0))
        assert log_temperature(17, schedule) == pytest.approx(math.sqrt(7.0) / math.log(4.0))

    def test_time_budget_only(self):
        g = mixed_graph(12, 0.5, 5)
        schedule = SaSchedule(c0=1.0, total_flips=10)
        trace, _ = sa_run(g, schedule, seed=0, time_budget=0.02)
        assert trace.total_work > 0

    def test_constant_temperature_chain_is_boltzmann(self):
        g = Graph.from_edges(3, [(0, 1, 1.0), (1, 2, -0.5)])
        temperature = 1.0
        samples = metropolis_samples(g, temperature, 40_000, seed=1, thin=5)
        assert samples.shape == (40_000, 3)

        states = [np.array(s) for s in product([-1, 1], repeat=3)]
        weights = np.array([math.exp(-ising_energy(g, s) / temperature) for s in states])
        expected = weights / weights.sum()
        codes = ((samples + 1) // 2) @ np.array([4, 2, 1])
        observed = np.bincount(codes, minlength=8) / len(samples)
        order = [int(((s + 1) // 2) @ np.array([4, 2, 1])) for s in states]
        assert 0.5 * np.abs(observed[order] - expected).sum() < 0.03


    def test_six_spin_chain_matches_boltzmann(self):
        g = mixed_graph(6, 0.8, 12)
        temperature = 2.0
        samples = metropolis_samples(g, temperature, 1_000_000, seed=5, thin=6)
        states = np.array(list(product([-1, 1], repeat=6)))
        energies = np.array([ising_energy(g, s) for s in states])
        weights = np.exp(-(energies - energies.min()) / temperature)
        expected = weights / weights.sum()
        codes = ((samples.astype(np.int64) + 1) // 2) @ (1 << np.arange(5, -1, -1))
        observed = np.bincount(codes, minlength=64) / len(samples)
        assert 0.5 * np.abs(observed - expected).sum() <= 0.02


class TestBreakout:
    def test_config_validation(self):
        with pytest.raises(ParameterError):
            BlsConfig(p_single=0.5, p_pair=0.5, p_random=0.5)
        with pytest.raises(ParameterError):
            BlsConfig(flip_budget=None, time_budget=None)
        with pytest.raises(ParameterError):
            BlsConfig(random_flips=0)

    def test_random_count(self):
        config = BlsConfig()
        assert config.random_count(50) == 3
        assert config.random_count(1000) == 10
        assert config.random_count(2) == 2
        assert BlsConfig(random_flips=7).random_count(100) == 7

    def test_budget_and_trace(self):
        g = mixed_graph(20, 0.4, 3)
        trace, result = bls_run(g, seed=1, config=BlsConfig(flip_budget=2000))
        assert 2000 <= trace.total_work <= 2000 + BlsConfig().random_count(20)
        assert result.ising_energy == pytest.approx(trace.final_best)

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_matches_oracle_on_small_graphs(self, seed):
        g = mixed_graph(12, 0.5, seed + 20)
        _, result = bls_run(g, seed=seed, config=BlsConfig(flip_budget=5000))
        assert result.cut_value == brute_force_maxcut(g).cut_value

    def test_stop_energy(self):
        g = complete_unit(6)
        trace, result = bls_run(g, seed=0, stop_energy=math.inf)
        assert len(trace) == 1


    @pytest.mark.slow
    def test_beats_restarts_on_toroidal_spin_glass(self):
        g = gen_toroidal_grid(20, 40, seed=11, weights="pm1")
        budget = 20_000
        bls, restarts = [], []
        for seed in range(20):
            bls.append(bls_run(g, seed=seed, config=BlsConfig(flip_budget=budget))[1].cut_value)
            restarts.append(restart_descent_run(g, seed=seed, flip_budget=budget)[1].cut_value)
        assert np.median(bls) > np.median(restarts)


class TestRestartDescent:
    def test_needs_a_budget(self, k4):
        with pytest.raises(ParameterError):
            restart_descent_run(k4, seed=0, flip_budget=None, time_budget=None)

    def test_budget_is_spent(self):
        g = mixed_graph(16, 0.4, 9)
        trace, result = restart_descent_run(g, seed=2, flip_budget=500)
        assert trace.total_work >= 500
        assert np.all(GainTable(g, result.spins).gains >= -1e-9)

    def test_matches_oracle_on_small_graph(self):
        g = mixed_graph(10, 0.5, 31)
        _, result = restart_descent_run(g, seed=0, flip_budget=5000)
        assert result.cut_value == brute_force_maxcut(g).cut_value
