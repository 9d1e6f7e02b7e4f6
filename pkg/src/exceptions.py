#!/usr/bin/env python3
"""
cimbench - Custom exception classes
"""

from typing import Optional


class CimBenchError(Exception):
    """Base exception for cimbench errors"""

    pass


class ParameterError(CimBenchError):
    """Raised when a parameter block violates its invariants"""

    pass


class GraphError(CimBenchError):
    """Raised when a graph or spin configuration is invalid"""

    pass


class GsetParseError(GraphError):
    """Raised when a G-set (rudy) file cannot be parsed"""

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"{message} at line {line_number}"
        super().__init__(message)


class OracleSizeError(GraphError):
    """Raised when exhaustive enumeration is requested on a graph too large for it"""

    pass


class SimulationError(CimBenchError):
    """Raised when the DOPO network simulation fails"""

    pass


class DivergenceError(SimulationError):
    """Raised when an amplitude becomes non-finite (time step too large)"""

    def __init__(self, round_trip: int):
        self.round_trip = round_trip
        super().__init__(
            f"amplitudes diverged at round trip {round_trip}; reduce dt"
        )


class SolverError(CimBenchError):
    """Raised when a classical solver fails"""

    pass


class ConvergenceError(SolverError):
    """Raised when an iterative method hits its iteration cap"""

    pass


class TraceError(CimBenchError):
    """Raised when a run trace violates its invariants"""

    pass


class BenchmarkError(CimBenchError):
    """Raised when a benchmark cannot be executed"""

    pass


class SpecError(BenchmarkError):
    """Raised when a benchmark spec file is malformed"""

    pass


class InstanceError(BenchmarkError):
    """Raised when a problem instance cannot be loaded or downloaded"""

    pass
