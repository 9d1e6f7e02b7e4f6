# cimbench Core functionality

from .bench import BenchmarkRunner, BenchmarkSpec, ScalingSpec, run_benchmark, scaling_report
from .cim import CimParams, ZeemanSchedule, run_trial
from .graph import CutResult, Graph, brute_force_maxcut, load_gset
from .instances import Instance, InstanceManager
from .sdp import GwConfig, gw_run
from .trace import RunTrace, average_traces, time_to_target

__all__ = [
    "BenchmarkRunner",
    "BenchmarkSpec",
    "CimParams",
    "CutResult",
    "Graph",
    "GwConfig",
    "Instance",
    "InstanceManager",
    "RunTrace",
    "ScalingSpec",
    "ZeemanSchedule",
    "average_traces",
    "brute_force_maxcut",
    "gw_run",
    "load_gset",
    "run_benchmark",
    "run_trial",
    "scaling_report",
    "time_to_target",
]
