#!/usr/bin/env python3
"""
cimbench - Configuration settings
"""

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional


class SolverKind:
    """Solver identifiers accepted by the CLI and benchmark specs"""

    CIM = "cim"
    SA = "sa"
    BLS = "bls"
    SG3 = "sg3"
    GW = "gw"
    DESCENT = "descent"

    ALL = (CIM, SA, BLS, SG3, GW, DESCENT)


class TimeBase:
    """Clock a run trace is measured against"""

    SIMULATED_CIM = "simulated-cim"
    WALL_CLOCK = "wall-clock"


class TargetRule:
    """How the time-to-target reference energy is chosen"""

    GW_ENERGY = "gw-energy"
    FIXED_ENERGY = "fixed-energy"
    FIXED_BUDGET = "fixed-budget"


class FileNames:
    """Default output file names"""

    SUMMARY = "summary.csv"
    TIMINGS = "timings.csv"
    TTT = "ttt.csv"
    AGGREGATE = "aggregate.csv"
    SCALING = "scaling.csv"
    PARAMS = "params.json"
    TRACES_DIR = "traces"
    PLOTDATA_DIR = "plotdata"
    GW_DIR = "gw"
    SCALING_FIT = "scaling_fit.csv"


class URLs:
    """Remote resources"""

    GSET_BASE = "https://web.stanford.edu/~yyye/yyye/Gset"


# One DOPO cavity round trip of the 2 km fiber ring (100 kHz clock)
DEFAULT_ROUNDTRIP_SECONDS = 10e-6

CLOCK_FREQUENCIES_HZ = (10e3, 100e3, 1e6)


class Presets:
    """Parameter blocks for the published experiments"""

    # Two-body MAX-CUT-3 on K4 and the four-body N=4 model. At A_s=30 the
    # 3-1 states are left within a few thousand steps; the 2-2 states are not.
    K4_DEMO: Dict[str, Any] = {
        "p": 1.1,
        "xi": -0.1,
        "a_s": 30.0,
        "dt": 0.5,
        "round_trips": 20000,
    }
    FOUR_BODY_DEMO: Dict[str, Any] = {
        "p": 1.1,
        "xi": -0.1,
        "a_s": 30.0,
        "dt": 0.5,
        "round_trips": 40000,
    }

    # Sparse G-set accuracy runs: 10 ms free evolution then four 10 ms hysteretic cycles
    GSET_CIM: Dict[str, Any] = {
        "p": 1.6,
        "xi": -0.06,
        "normalize_by_degree": True,
        "round_trips": 5000,
    }
    GSET_ZEEMAN: Dict[str, Any] = {
        "free_roundtrips": 1000,
        "cycles": 4,
        "cycle_roundtrips": 1000,
    }

    # Complete +-1 graphs, time-to-target against the GW energy
    COMPLETE_CIM: Dict[str, Any] = {
        "p": 0.2,
        "xi": -0.85,
        "normalize_by_degree": True,
        "round_trips": 1000,
    }
    # Constant Monte Carlo steps: c0 = sqrt(N - 1) held for each sweep of N proposals
    COMPLETE_SA: Dict[str, Any] = {"sweeps": 300, "c0_rule": "rms-field", "per_sweep": True}


@dataclass(frozen=True)
class GsetReference:
    """Published row for one G-set graph (scores normalized by U_SDP)"""

    name: str
    n_vertices: int
    n_edges: int
    u_sdp: float
    c_best: float
    c_gw: float
    c_sa: float
    c_sa_mean: float
    c_cim: float
    c_cim_mean: float


def _ref(name, n, m, u, *scores) -> GsetReference:
    return GsetReference(name, n, m, float(u), *scores)


GSET_REFERENCE: Dict[str, GsetReference] = {
    r.name: r
    for r in (
        _ref("g1", 800, 19176, 12083, 0.9620, 0.9457, 0.9620, 0.9597, 0.9614, 0.9570),
        _ref("g6", 800, 19176, 2656, 0.9607, 0.9448, 0.9606, 0.9592, 0.9601, 0.9559),
        _ref("g11", 800, 1600, 629, 0.9540, 0.9327, 0.9526, 0.9478, 0.9455, 0.9370),
        _ref("g14", 800, 4694, 3191, 0.9602, 0.9336, 0.9580, 0.9544, 0.9514, 0.9472),
        _ref("g18", 800, 4694, 1166, 0.9500, 0.9282, 0.9492, 0.9439, 0.9434, 0.9372),
        _ref("g22", 2000, 19990, 14136, 0.9450, 0.9191, 0.9445, 0.9409, 0.9405, 0.9361),
        _ref("g27", 2000, 19990, 4141, 0.9435, 0.9174, 0.9422, 0.9400, 0.9390, 0.9356),
        _ref("g32", 2000, 4000, 1567, 0.9559, 0.9272, 0.9508, 0.9478, 0.9424, 0.9384),
        _ref("g35", 2000, 11778, 8014, 0.9588, 0.9292, 0.9551, 0.9523, 0.9471, 0.9438),
        _ref("g39", 2000, 11778, 2877, 0.9464, 0.9226, 0.9431, 0.9399, 0.9364, 0.9318),
        _ref("g43", 1000, 9990, 7032, 0.9471, 0.9292, 0.9471, 0.9439, 0.9458, 0.9396),
        _ref("g48", 3000, 6000, 6000, 1.0000, 1.0000, 1.0000, 0.9919, 1.0000, 0.9747),
        _ref("g51", 1000, 5909, 4006, 0.9606, 0.9333, 0.9583, 0.9544, 0.9506, 0.9468),
        _ref("g55", 5000, 12498, 11039, 0.9325, 0.9006, 0.9264, 0.9215, 0.9193, 0.9160),
        _ref("g57", 5000, 10000, 3885, 0.9561, 0.9237, 0.9496, 0.9473, 0.9419, 0.9384),
        _ref("g59", 5000, 29570, 7312, 0.9440, 0.9148, 0.9376, 0.9356, 0.9308, 0.9288),
        _ref("g60", 7000, 17148, 15222, 0.9313, 0.8989, 0.9231, 0.9201, 0.9191, 0.9152),
        _ref("g64", 7000, 41459, 10466, 0.9440, 0.9143, 0.9347, 0.9324, 0.9320, 0.9299),
        _ref("g67", 10000, 20000, 7744, 0.9554, 0.9215, 0.9480, 0.9459, 0.9411, 0.9388),
        _ref("g70", 10000, 9999, 9863, 0.9674, 0.9633, 0.9523, 0.9479, 0.9515, 0.9482),
        _ref("g81", 20000, 40000, 15656, 0.9551, 0.9195, 0.9187, 0.9125, 0.9393, 0.9376),
    )
}


def _env_int(name: str, default: int) -> int:
    value = os.getenv(name)
    return int(value) if value else default


def _env_float(name: str, default: float) -> float:
    value = os.getenv(name)
    return float(value) if value else default


@dataclass
class Config:
    """cimbench runtime configuration"""

    # Paths - will be set in __post_init__
    cache_dir: Optional[Path] = None
    out_dir: Optional[Path] = None

    # Trials run concurrently by the benchmark harness
    workers: Optional[int] = None

    # Wall-clock seconds per simulated CIM round trip
    roundtrip_seconds: Optional[float] = None

    def __post_init__(self):
        # Set values using environment variables with fallbacks
        if self.cache_dir is None:
            env_path = os.getenv("CIMBENCH_CACHE_DIR")
            if env_path:
                self.cache_dir = Path(env_path)
            else:
                self.cache_dir = Path.home() / ".cache" / "cimbench"

        if self.out_dir is None:
            self.out_dir = Path(os.getenv("CIMBENCH_OUT_DIR", "results"))

        if self.workers is None:
            self.workers = _env_int("CIMBENCH_WORKERS", 1)

        if self.roundtrip_seconds is None:
            self.roundtrip_seconds = _env_float(
                "CIMBENCH_ROUNDTRIP_SECONDS", DEFAULT_ROUNDTRIP_SECONDS
            )

        self.workers = max(1, int(self.workers))
