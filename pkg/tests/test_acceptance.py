"""End-to-end checks at full benchmark scale (pytest -m slow)"""

from itertools import product

import numpy as np
import pytest
from conftest import complete_unit, mixed_graph
from scipy.stats import chisquare

from config import Presets, SolverKind
from core.bench import ScalingSpec, scaling_report
from core.cim import (
    CimParams,
    ZeemanSchedule,
    run_trial,
    sample_final_spins,
    sample_four_body_spins,
    spin_label,
)
from core.graph import brute_force_maxcut, gen_complete_pm1, gen_random_graph, ground_states, normalized_score
from core.heuristics import BlsConfig, SaSchedule, bls_run, sa_run
from core.instances import InstanceManager
from core.sdp import gw_run, solve_relaxation, spectral_upper_bound
from core.seeding import derive_seed
from core.trace import cim_clock_time, time_to_target

pytestmark = pytest.mark.slow

GW_RATIO = 0.87856


def test_k4_degenerate_ground_states():
    graph = complete_unit(4)
    spins = sample_final_spins(graph, CimParams.from_dict(Presets.K4_DEMO), 1000, seed=2024)
    labels = [spin_label(row) for row in spins]
    wanted = sorted(spin_label(row) for row in ground_states(graph))
    counts = np.array([labels.count(label) for label in wanted])

    assert counts.sum() >= 990
    assert np.all(counts > 0)
    assert chisquare(counts).pvalue > 0.001


def test_four_body_odd_parity():
    params = CimParams.from_dict(Presets.FOUR_BODY_DEMO)
    spins = sample_four_body_spins(-1.0, params, 1000, seed=2024)
    odd = spins[np.prod(spins, axis=1) == -1]

    assert len(odd) >= 990
    expected = {s for s in product([-1, 1], repeat=4) if np.prod(s) == -1}
    assert {tuple(int(x) for x in row) for row in odd} == expected


ORACLE_GRAPHS = [
    mixed_graph(int(n), 0.5, seed) for seed, n in enumerate(np.resize([10, 12, 14, 16], 50))
]


@pytest.fixture(scope="module")
def optima():
    return [brute_force_maxcut(g) for g in ORACLE_GRAPHS]


class TestOracleEquivalence:
    GRAPHS = ORACLE_GRAPHS

    def test_simulated_annealing(self, optima):
        hits = 0
        for k, (graph, best) in enumerate(zip(self.GRAPHS, optima)):
            schedule = SaSchedule.for_graph(graph, total_flips=10**6, sample_every=10**4)
            _, result = sa_run(graph, schedule, seed=k, stop_energy=best.ising_energy)
            hits += result.cut_value == best.cut_value
        assert hits >= 48

    def test_breakout_search(self, optima):
        hits = 0
        for k, (graph, best) in enumerate(zip(self.GRAPHS, optima)):
            config = BlsConfig(flip_budget=10**5)
            _, result = bls_run(graph, k, config, stop_energy=best.ising_energy)
            hits += result.cut_value == best.cut_value
        assert hits >= 48

    def test_cim_best_of_twenty(self, optima):
        params = CimParams.from_dict(Presets.GSET_CIM)
        schedule = ZeemanSchedule.from_dict(Presets.GSET_ZEEMAN)
        hits = 0
        for k, (graph, best) in enumerate(zip(self.GRAPHS, optima)):
            for trial in range(20):
                _, result = run_trial(
                    graph, params, schedule, derive_seed(k, trial), stop_energy=best.ising_energy
                )
                if result.cut_value == best.cut_value:
                    hits += 1
                    break
        assert hits >= 48

    def test_bounds_dominate(self, optima):
        for k, (graph, best) in enumerate(zip(self.GRAPHS, optima)):
            slack = 1e-4 * max(1.0, abs(best.cut_value))
            assert solve_relaxation(graph, seed=k).objective >= best.cut_value - slack
            assert spectral_upper_bound(graph) >= best.cut_value


def test_gw_ratio_on_nonnegative_graphs():
    for seed in range(20):
        graph = gen_random_graph(50, 0.2, seed)
        report = gw_run(graph, seed=seed)
        assert report.cut.cut_value >= GW_RATIO * report.objective


@pytest.mark.network
def test_gw_quality_on_g11(logger, config):
    (instance,) = InstanceManager(logger, config).resolve("gset:g11")
    report = gw_run(instance.graph, seed=0)
    assert abs(report.objective - 629.0) / 629.0 < 0.01
    score = normalized_score(report.cut.cut_value, 629.0, instance.graph.negative_weight)
    assert abs(score - 0.9327) <= 0.01


def test_scaling_shape(config, logger):
    report = scaling_report(ScalingSpec(sizes=[40, 80, 160, 320, 640], trials=20), logger, config)
    assert -0.3 <= report.exponent(SolverKind.CIM, "mean_work_to_target") <= 0.3
    sa = report.table[report.table["solver"] == SolverKind.SA]
    assert (sa["successes"] > 0).all()
    assert sa["successes"].sum() >= 0.6 * sa["trials"].sum()
    assert 0.7 <= report.exponent(SolverKind.SA, "mean_work_to_target") <= 1.3
    assert 1.5 <= report.exponent(SolverKind.SA, "mean_time_to_target") <= 2.5
    assert 1.5 <= report.exponent(SolverKind.SG3, "mean_time_to_target") <= 2.5


def test_k800_simulated_clock():
    graph = gen_complete_pm1(800, 0)
    target = gw_run(graph, seed=0).cut.ising_energy
    params = CimParams.from_dict(Presets.COMPLETE_CIM)
    times = []
    for trial in range(5):
        trace, _ = run_trial(graph, params, seed=trial, stop_energy=target)
        times.append(time_to_target(trace, target))
    assert all(t is not None for t in times)
    assert 1e-4 <= np.mean(times) <= 1e-2
    assert cim_clock_time(params.round_trips) == pytest.approx(0.01)
