#!/usr/bin/env python3
"""
cimbench - Benchmark harness

Runs every solver x trial of a BenchmarkSpec on each instance, measures
time-to-target against the GW energy (or a fixed energy), and writes:

    summary.csv     deterministic per (instance, solver) results
    timings.csv     wall-clock quantities per (instance, solver)
    ttt.csv         per-trial time/work to target
    aggregate.csv   per-solver mean and worst normalised scores over instances
    params.json     spec and resolved parameters
    traces/         one CSV per trial
    plotdata/       averaged best-energy curves (x, mean, std)
    gw/             relaxation objective per sweep

Graph loading happens before any clock starts.
"""

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from config import Config, FileNames, Presets, SolverKind, TargetRule, TimeBase
from core.cim import CimParams, ZeemanSchedule, run_trial
from core.graph import CutResult, Graph, gen_complete_pm1, normalized_score
from core.heuristics import (
    BlsConfig,
    C0Rule,
    SaSchedule,
    bls_run,
    restart_descent_run,
    sa_run,
    sg3_run,
)
from core.instances import Instance, InstanceManager, InstanceRef
from core.sdp import GwConfig, GwReport, gw_run
from core.seeding import derive_seed, seed_label
from core.trace import (
    RunTrace,
    TraceRecorder,
    average_traces,
    fit_exponent,
    time_to_target,
    work_to_target,
)
from exceptions import ParameterError, SimulationError, SpecError
from utils.logger import Logger, silent_logger

TrialFn = Callable[[Graph, Any, Optional[float]], Tuple[RunTrace, CutResult]]

CIM_PRESETS: Dict[str, Tuple[Dict[str, Any], Optional[Dict[str, Any]]]] = {
    "k4": (Presets.K4_DEMO, None),
    "gset": (Presets.GSET_CIM, Presets.GSET_ZEEMAN),
    "complete": (Presets.COMPLETE_CIM, None),
}

GW_REFERENCE_ID = "gw-reference"
_SG3_MIN_SECONDS = 0.05


@dataclass
class SolverEntry:
    """One solver column of a benchmark: kind, unique id and its parameter block"""

    kind: str
    solver_id: str
    params: Dict[str, Any] = field(default_factory=dict)
    schedule: Optional[Dict[str, Any]] = None

    @classmethod
    def from_json(cls, item: Any) -> "SolverEntry":
        if isinstance(item, str):
            item = {"kind": item}
        if not isinstance(item, dict) or "kind" not in item:
            raise SpecError(f"solver entry needs a 'kind': {item!r}")
        unknown = set(item) - {"kind", "id", "params", "schedule", "preset"}
        if unknown:
            raise SpecError(f"unknown solver entry fields: {', '.join(sorted(unknown))}")

        kind = item["kind"]
        if kind not in SolverKind.ALL:
            raise SpecError(f"unknown solver {kind!r} ({', '.join(SolverKind.ALL)})")
        params = dict(item.get("params") or {})
        schedule = item.get("schedule")
        preset = item.get("preset")
        if preset is not None:
            if kind != SolverKind.CIM or preset not in CIM_PRESETS:
                raise SpecError(f"unknown preset {preset!r} for solver {kind}")
            base, preset_schedule = CIM_PRESETS[preset]
            params = {**base, **params}
            if schedule is None and preset_schedule is not None:
                schedule = dict(preset_schedule)
        return cls(kind, str(item.get("id", kind)), params, schedule)

    @property
    def time_base(self) -> str:
        return TimeBase.SIMULATED_CIM if self.kind == SolverKind.CIM else TimeBase.WALL_CLOCK

    def to_json(self) -> Dict[str, Any]:
        data = {"kind": self.kind, "id": self.solver_id, "params": self.params}
        if self.schedule is not None:
            data["schedule"] = self.schedule
        return data


def _one_shot(solver_id: str, seed, solve: Callable[[], CutResult]) -> Tuple[RunTrace, CutResult]:
    start = time.perf_counter()
    cut = solve()
    elapsed = time.perf_counter() - start
    recorder = TraceRecorder(solver_id, seed_label(seed), TimeBase.WALL_CLOCK, "runs")
    recorder.record(1, elapsed, cut.ising_energy)
    return recorder.build(), cut


def build_runner(entry: SolverEntry, roundtrip_seconds: Optional[float] = None) -> TrialFn:
    """
    Validate a solver entry and return the callable that runs one trial.
    roundtrip_seconds sets the CIM clock unless the entry's params fix it.
    """
    p = dict(entry.params)
    sid = entry.solver_id
    try:
        if entry.kind == SolverKind.CIM:
            if roundtrip_seconds is not None:
                p.setdefault("roundtrip_seconds", roundtrip_seconds)
            params = CimParams.from_dict(p)
            schedule = ZeemanSchedule.from_dict(entry.schedule) if entry.schedule else None
            return lambda graph, seed, stop: run_trial(graph, params, schedule, seed, sid, stop)

        if entry.kind == SolverKind.SA:
            sweeps = p.pop("sweeps", None)
            if sweeps is not None and "total_flips" in p:
                raise SpecError("give either sweeps or total_flips, not both")
            if sweeps is not None and int(sweeps) < 1:
                raise SpecError(f"sweeps must be >= 1, got {sweeps}")
            flips_given = "total_flips" in p or sweeps is not None
            total_flips = int(p.pop("total_flips", 10**5))
            per_sweep = bool(p.pop("per_sweep", False))
            time_budget = p.pop("time_budget", None)
            c0 = p.pop("c0", None)
            c0_rule = p.pop("c0_rule", C0Rule.ROW_SUM)
            # fail early on bad schedule fields
            SaSchedule(c0=1.0 if c0 is None else c0, total_flips=total_flips, **p)
            flip_budget = total_flips if flips_given or time_budget is None else None

            def run_sa(graph, seed, stop):
                flips = total_flips if sweeps is None else int(sweeps) * graph.n_vertices
                budget = flips if flip_budget is not None else None
                fields = dict(p)
                if per_sweep:
                    fields.setdefault("flips_per_step", graph.n_vertices)
                if c0 is not None:
                    schedule = SaSchedule(c0=c0, total_flips=flips, **fields)
                else:
                    schedule = SaSchedule.for_graph(graph, flips, c0_rule, **fields)
                return sa_run(graph, schedule, seed, budget, time_budget, sid, stop)

            return run_sa

        if entry.kind == SolverKind.BLS:
            config = BlsConfig(**p)
            return lambda graph, seed, stop: bls_run(graph, seed, config, sid, stop)

        if entry.kind == SolverKind.DESCENT:
            flip_budget = p.pop("flip_budget", 10**5)
            time_budget = p.pop("time_budget", None)
            if p:
                raise SpecError(f"unknown descent parameters: {', '.join(sorted(p))}")
            return lambda graph, seed, stop: restart_descent_run(
                graph, seed, flip_budget, time_budget, sid, stop
            )

        if entry.kind == SolverKind.SG3:
            if p:
                raise SpecError("sg3 takes no parameters")
            return lambda graph, seed, stop: _one_shot(sid, seed, lambda: sg3_run(graph))

        config = GwConfig(**p)
        return lambda graph, seed, stop: _one_shot(
            sid, seed, lambda: gw_run(graph, config, seed).cut
        )
    except TypeError as e:
        raise SpecError(f"invalid parameters for solver {sid}: {e}") from e
    except ParameterError as e:
        raise SpecError(f"invalid parameters for solver {sid}: {e}") from e


_SPEC_KEYS = {
    "instances",
    "solvers",
    "trials",
    "target",
    "target_energy",
    "master_seed",
    "out_dir",
    "gw",
    "stop_at_target",
    "write_traces",
    "plot_points",
}


@dataclass
class BenchmarkSpec:
    """What to run: instances x solvers x trials, and how success is judged"""

    instances: List[InstanceRef]
    solvers: List[SolverEntry]
    trials: int = 100
    target: str = TargetRule.GW_ENERGY
    target_energy: Optional[float] = None
    master_seed: int = 0
    out_dir: Optional[Path] = None
    gw: Dict[str, Any] = field(default_factory=dict)
    stop_at_target: bool = False
    write_traces: bool = True
    plot_points: int = 200

    def __post_init__(self):
        if not self.instances:
            raise SpecError("benchmark spec lists no instances")
        if not self.solvers:
            raise SpecError("benchmark spec lists no solvers")
        if int(self.trials) < 1:
            raise SpecError(f"trials must be >= 1, got {self.trials}")
        rules = (TargetRule.GW_ENERGY, TargetRule.FIXED_ENERGY, TargetRule.FIXED_BUDGET)
        if self.target not in rules:
            raise SpecError(f"unknown target rule {self.target!r} ({', '.join(rules)})")
        if self.target == TargetRule.FIXED_ENERGY and self.target_energy is None:
            raise SpecError("target rule fixed-energy needs target_energy")
        ids = [s.solver_id for s in self.solvers]
        if len(set(ids)) != len(ids) or GW_REFERENCE_ID in ids:
            raise SpecError(f"solver ids must be unique and not {GW_REFERENCE_ID!r}: {ids}")
        if self.plot_points < 2:
            raise SpecError(f"plot_points must be >= 2, got {self.plot_points}")
        try:
            GwConfig(**self.gw)
        except (TypeError, ParameterError) as e:
            raise SpecError(f"invalid gw block: {e}") from e
        self.trials = int(self.trials)
        if self.out_dir is not None:
            self.out_dir = Path(self.out_dir)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "BenchmarkSpec":
        if not isinstance(data, dict):
            raise SpecError("benchmark spec must be a JSON object")
        unknown = set(data) - _SPEC_KEYS
        if unknown:
            raise SpecError(f"unknown spec fields: {', '.join(sorted(unknown))}")
        data = dict(data)
        if "instances" not in data or "solvers" not in data:
            raise SpecError("benchmark spec needs 'instances' and 'solvers'")
        data["solvers"] = [SolverEntry.from_json(s) for s in data["solvers"]]
        if isinstance(data["instances"], (str, dict)):
            data["instances"] = [data["instances"]]
        return cls(**data)

    @classmethod
    def from_json(cls, path: Path) -> "BenchmarkSpec":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except FileNotFoundError as e:
            raise SpecError(f"spec file not found: {path}") from e
        except json.JSONDecodeError as e:
            raise SpecError(f"spec file {path} is not valid JSON: {e}") from e
        return cls.from_dict(data)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "instances": self.instances,
            "solvers": [s.to_json() for s in self.solvers],
            "trials": self.trials,
            "target": self.target,
            "target_energy": self.target_energy,
            "master_seed": self.master_seed,
            "out_dir": None if self.out_dir is None else str(self.out_dir),
            "gw": self.gw,
            "stop_at_target": self.stop_at_target,
            "write_traces": self.write_traces,
            "plot_points": self.plot_points,
        }


@dataclass
class TrialResult:
    instance: str
    solver_id: str
    trial: int
    seed: int
    trace: Optional[RunTrace]
    cut: Optional[CutResult]
    wall_seconds: float
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.error is not None


@dataclass
class SummaryRow:
    """Deterministic outcome of one solver on one instance"""

    instance: str
    n: int
    m: int
    solver: str
    kind: str
    time_base: str
    trials: int
    failures: int
    best_cut: float
    mean_cut: float
    normalized_best: float
    normalized_mean: float
    success_count: int
    mean_work_to_target: float
    mean_time_to_target: float
    u_bound: float
    u_source: str
    e_neg: float
    target_energy: float


@dataclass
class BenchmarkResult:
    rows: List[SummaryRow]
    trials: List[TrialResult]
    gw_reports: Dict[str, GwReport]
    out_dir: Optional[Path]

    def summary_frame(self) -> pd.DataFrame:
        return pd.DataFrame([asdict(r) for r in self.rows], columns=[f.name for f in fields(SummaryRow)])


def _map_ordered(workers: int, fn: Callable, items: Sequence, on_done=None) -> List[Any]:
    """fn over items on a thread pool; results come back in input order"""
    results: List[Any] = [None] * len(items)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        futures = {pool.submit(fn, item): k for k, item in enumerate(items)}
        for count, future in enumerate(as_completed(futures), 1):
            results[futures[future]] = future.result()
            if on_done is not None:
                on_done(count, len(items))
    return results


def _mean_or_nan(values: Sequence[float]) -> float:
    return float(np.mean(values)) if len(values) else math.nan


class BenchmarkRunner:
    """Executes a BenchmarkSpec and writes its reports"""

    def __init__(
        self,
        logger: Logger,
        config: Config,
        instances: Optional[InstanceManager] = None,
    ):
        self.logger = logger
        self.config = config
        self.instances = instances or InstanceManager(logger, config)

    def run(self, spec: BenchmarkSpec, write: bool = True) -> BenchmarkResult:
        runners = {
            entry.solver_id: build_runner(entry, self.config.roundtrip_seconds)
            for entry in spec.solvers
        }
        resolved: List[Instance] = []
        for ref in spec.instances:
            resolved.extend(self.instances.resolve(ref))
        names = [inst.name for inst in resolved]
        if len(set(names)) != len(names):
            raise SpecError(f"instance names must be unique: {names}")

        out_dir = Path(spec.out_dir or self.config.out_dir) if write else None
        rows: List[SummaryRow] = []
        all_trials: List[TrialResult] = []
        gw_reports: Dict[str, GwReport] = {}

        for instance in resolved:
            graph = instance.graph
            self.logger.info(f"Instance {instance.name}: N={graph.n_vertices} m={graph.n_edges}")
            needs_gw = spec.target == TargetRule.GW_ENERGY or instance.u_sdp is None
            report = None
            if needs_gw:
                report = gw_run(
                    graph,
                    GwConfig(**spec.gw),
                    derive_seed(spec.master_seed, instance.name, GW_REFERENCE_ID),
                    self.logger,
                )
                gw_reports[instance.name] = report
                self.logger.info(
                    f"GW reference: cut {report.cut.cut_value:g}, "
                    f"relaxation {report.objective:.4f}, spectral bound {report.spectral_bound:.4f}"
                )

            target = self._target_energy(spec, report)
            if instance.u_sdp is not None:
                u_bound, u_source = instance.u_sdp, "reference"
            else:
                u_bound, u_source = report.objective, "relaxation"

            trials = self._run_trials(instance, spec, runners, target)
            all_trials.extend(trials)
            for entry in spec.solvers:
                own = [t for t in trials if t.solver_id == entry.solver_id]
                row = self._summarize(instance, entry, own, u_bound, u_source, target)
                rows.append(row)
                self.logger.success(
                    f"{instance.name} {entry.solver_id}: best {row.best_cut:g} "
                    f"(normalized {row.normalized_best:.4f}), "
                    f"reached target {row.success_count}/{row.trials}"
                )
            if report is not None:
                rows.append(self._gw_row(instance, report, u_bound, u_source, target))

        result = BenchmarkResult(rows, all_trials, gw_reports, out_dir)
        if out_dir is not None:
            ReportWriter(self.logger, out_dir).write(spec, resolved, result)
        return result

    @staticmethod
    def _target_energy(spec: BenchmarkSpec, report: Optional[GwReport]) -> Optional[float]:
        if spec.target == TargetRule.GW_ENERGY:
            return report.cut.ising_energy
        if spec.target == TargetRule.FIXED_ENERGY:
            return float(spec.target_energy)
        return None

    def _run_trials(
        self,
        instance: Instance,
        spec: BenchmarkSpec,
        runners: Dict[str, TrialFn],
        target: Optional[float],
    ) -> List[TrialResult]:
        stop = target if spec.stop_at_target else None
        # build the shared adjacency once, before the worker threads read it
        instance.graph.csr_arrays
        tasks = [(entry.solver_id, k) for entry in spec.solvers for k in range(spec.trials)]

        def work(task):
            solver_id, k = task
            seed = derive_seed(spec.master_seed, instance.name, solver_id, k)
            start = time.perf_counter()
            try:
                trace, cut = runners[solver_id](instance.graph, seed, stop)
            except SimulationError as e:
                self.logger.warning(f"{instance.name} {solver_id} trial {k}: {e}")
                return TrialResult(
                    instance.name, solver_id, k, seed_label(seed), None, None,
                    time.perf_counter() - start, str(e),
                )
            return TrialResult(
                instance.name, solver_id, k, seed_label(seed), trace, cut,
                time.perf_counter() - start,
            )

        def progress(done, total):
            self.logger.progress(f"{instance.name}: {done}/{total} trials finished")

        return _map_ordered(self.config.workers, work, tasks, progress)

    @staticmethod
    def _summarize(
        instance: Instance,
        entry: SolverEntry,
        trials: List[TrialResult],
        u_bound: float,
        u_source: str,
        target: Optional[float],
    ) -> SummaryRow:
        graph = instance.graph
        done = [t for t in trials if not t.failed]
        cuts = [t.cut.cut_value for t in done]
        best_cut = max(cuts) if cuts else math.nan
        mean_cut = _mean_or_nan(cuts)
        e_neg = graph.negative_weight

        works, times = [], []
        if target is not None:
            for t in done:
                w = work_to_target(t.trace, target)
                if w is not None:
                    works.append(w)
                    times.append(time_to_target(t.trace, target))
        success = len(works) if target is not None else len(done)
        deterministic_time = entry.time_base == TimeBase.SIMULATED_CIM

        return SummaryRow(
            instance=instance.name,
            n=graph.n_vertices,
            m=graph.n_edges,
            solver=entry.solver_id,
            kind=entry.kind,
            time_base=entry.time_base,
            trials=len(trials),
            failures=len(trials) - len(done),
            best_cut=best_cut,
            mean_cut=mean_cut,
            normalized_best=normalized_score(best_cut, u_bound, e_neg) if cuts else math.nan,
            normalized_mean=normalized_score(mean_cut, u_bound, e_neg) if cuts else math.nan,
            success_count=success,
            mean_work_to_target=_mean_or_nan(works),
            mean_time_to_target=_mean_or_nan(times) if deterministic_time else math.nan,
            u_bound=u_bound,
            u_source=u_source,
            e_neg=e_neg,
            target_energy=math.nan if target is None else target,
        )

    @staticmethod
    def _gw_row(
        instance: Instance,
        report: GwReport,
        u_bound: float,
        u_source: str,
        target: Optional[float],
    ) -> SummaryRow:
        graph = instance.graph
        cut = report.cut.cut_value
        score = normalized_score(cut, u_bound, graph.negative_weight)
        reached = target is None or report.cut.ising_energy <= target
        return SummaryRow(
            instance=instance.name,
            n=graph.n_vertices,
            m=graph.n_edges,
            solver=GW_REFERENCE_ID,
            kind=SolverKind.GW,
            time_base=TimeBase.WALL_CLOCK,
            trials=1,
            failures=0,
            best_cut=cut,
            mean_cut=cut,
            normalized_best=score,
            normalized_mean=score,
            success_count=int(reached),
            mean_work_to_target=math.nan,
            mean_time_to_target=math.nan,
            u_bound=u_bound,
            u_source=u_source,
            e_neg=graph.negative_weight,
            target_energy=math.nan if target is None else target,
        )


def run_benchmark(
    spec: BenchmarkSpec,
    logger: Optional[Logger] = None,
    config: Optional[Config] = None,
    write: bool = True,
) -> BenchmarkResult:
    return BenchmarkRunner(logger or silent_logger(), config or Config()).run(spec, write)


def _safe_name(name: str) -> str:
    return "".join(ch if ch.isalnum() or ch in "-_." else "_" for ch in name)


class ReportWriter:
    """CSV/JSON artifacts of a finished benchmark"""

    def __init__(self, logger: Logger, out_dir: Path):
        self.logger = logger
        self.out_dir = Path(out_dir)

    def write(self, spec: BenchmarkSpec, instances: List[Instance], result: BenchmarkResult) -> None:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        result.summary_frame().to_csv(self.out_dir / FileNames.SUMMARY, index=False)
        self.ttt_frame(result).to_csv(self.out_dir / FileNames.TTT, index=False)
        self.timings_frame(result).to_csv(self.out_dir / FileNames.TIMINGS, index=False)
        self.aggregate_frame(result).to_csv(self.out_dir / FileNames.AGGREGATE, index=False)
        self.write_params(spec, instances, result)
        if spec.write_traces:
            self.write_traces(result)
        self.write_plotdata(spec, result)
        self.write_gw(result)
        self.logger.success(f"Reports written to {self.out_dir}")

    @staticmethod
    def ttt_frame(result: BenchmarkResult) -> pd.DataFrame:
        targets = {(r.instance, r.solver): r.target_energy for r in result.rows}
        records = []
        for t in result.trials:
            target = targets.get((t.instance, t.solver_id), math.nan)
            has_target = t.trace is not None and not math.isnan(target)
            work = work_to_target(t.trace, target) if has_target else None
            records.append(
                {
                    "instance": t.instance,
                    "solver": t.solver_id,
                    "trial": t.trial,
                    "seed": t.seed,
                    "time_base": None if t.trace is None else t.trace.time_base,
                    "reached": work is not None,
                    "work_to_target": math.nan if work is None else work,
                    "time_to_target": (
                        time_to_target(t.trace, target) if work is not None else math.nan
                    ),
                    "final_best_energy": math.nan if t.trace is None else t.trace.final_best,
                    "final_cut": math.nan if t.cut is None else t.cut.cut_value,
                    "wall_seconds": t.wall_seconds,
                    "error": t.error or "",
                }
            )
        return pd.DataFrame(records)

    def timings_frame(self, result: BenchmarkResult) -> pd.DataFrame:
        ttt = self.ttt_frame(result)
        records = []
        if len(ttt):
            for (instance, solver), group in ttt.groupby(["instance", "solver"], sort=False):
                reached = group[group["reached"]]
                records.append(
                    {
                        "instance": instance,
                        "solver": solver,
                        "time_base": group["time_base"].dropna().iloc[0]
                        if group["time_base"].notna().any()
                        else None,
                        "mean_wall_seconds": group["wall_seconds"].mean(),
                        "mean_time_to_target": reached["time_to_target"].mean(),
                        "median_time_to_target": reached["time_to_target"].median(),
                    }
                )
        for name, report in result.gw_reports.items():
            records.append(
                {
                    "instance": name,
                    "solver": GW_REFERENCE_ID,
                    "time_base": TimeBase.WALL_CLOCK,
                    "mean_wall_seconds": report.solve_seconds + report.round_seconds,
                    "mean_time_to_target": report.solve_seconds + report.round_seconds,
                    "median_time_to_target": report.solve_seconds + report.round_seconds,
                }
            )
        return pd.DataFrame(records)

    @staticmethod
    def aggregate_frame(result: BenchmarkResult) -> pd.DataFrame:
        summary = result.summary_frame()
        if summary.empty:
            return summary
        grouped = summary.groupby("solver", sort=False)
        return pd.DataFrame(
            {
                "instances": grouped["instance"].count(),
                "mean_normalized_best": grouped["normalized_best"].mean(),
                "worst_normalized_best": grouped["normalized_best"].min(),
                "mean_normalized_mean": grouped["normalized_mean"].mean(),
                "worst_normalized_mean": grouped["normalized_mean"].min(),
            }
        ).reset_index()

    def write_params(self, spec: BenchmarkSpec, instances: List[Instance], result: BenchmarkResult) -> None:
        payload = {
            "spec": spec.to_dict(),
            "cim_defaults": asdict(CimParams()),
            "instances": [
                {
                    "name": inst.name,
                    "source": inst.source,
                    "n": inst.graph.n_vertices,
                    "m": inst.graph.n_edges,
                    "u_sdp": inst.u_sdp,
                    "reference": None if inst.reference is None else asdict(inst.reference),
                }
                for inst in instances
            ],
            "gw": {name: report.summary() for name, report in result.gw_reports.items()},
        }
        path = self.out_dir / FileNames.PARAMS
        path.write_text(json.dumps(payload, indent=2, default=str) + "\n", encoding="utf-8")

    def write_traces(self, result: BenchmarkResult) -> None:
        for t in result.trials:
            if t.trace is None:
                continue
            folder = self.out_dir / FileNames.TRACES_DIR / _safe_name(t.instance)
            folder.mkdir(parents=True, exist_ok=True)
            t.trace.write_csv(folder / f"{_safe_name(t.solver_id)}__trial{t.trial:04d}.csv")

    def write_plotdata(self, spec: BenchmarkSpec, result: BenchmarkResult) -> None:
        folder = self.out_dir / FileNames.PLOTDATA_DIR
        groups: Dict[Tuple[str, str], List[RunTrace]] = {}
        for t in result.trials:
            if t.trace is not None:
                groups.setdefault((t.instance, t.solver_id), []).append(t.trace)
        for (instance, solver), traces in groups.items():
            start = max(tr.time_seconds[0] for tr in traces)
            end = max(tr.time_seconds[-1] for tr in traces)
            grid = np.linspace(start, end, spec.plot_points) if end > start else [start]
            curve = average_traces(traces, grid)
            folder.mkdir(parents=True, exist_ok=True)
            curve.to_frame(traces[0].time_column).to_csv(
                folder / f"{_safe_name(instance)}__{_safe_name(solver)}.csv", index=False
            )

    def write_gw(self, result: BenchmarkResult) -> None:
        if not result.gw_reports:
            return
        folder = self.out_dir / FileNames.GW_DIR
        folder.mkdir(parents=True, exist_ok=True)
        for name, report in result.gw_reports.items():
            report.trajectory_frame().to_csv(folder / f"{_safe_name(name)}.csv", index=False)


# --- Scaling ---------------------------------------------------------------------


@dataclass
class ScalingSpec:
    """Time-to-target against problem size on +-1 complete graphs"""

    sizes: List[int]
    trials: int = 20
    solvers: List[str] = field(
        default_factory=lambda: [SolverKind.CIM, SolverKind.SA, SolverKind.SG3]
    )
    master_seed: int = 0
    cim: Dict[str, Any] = field(default_factory=lambda: dict(Presets.COMPLETE_CIM))
    sa: Dict[str, Any] = field(default_factory=lambda: dict(Presets.COMPLETE_SA))
    bls: Dict[str, Any] = field(default_factory=dict)
    gw: Dict[str, Any] = field(default_factory=dict)
    # annealers whose budget is tuned per size: timed over the whole run
    full_budget: List[str] = field(default_factory=lambda: [SolverKind.SA])
    out_dir: Optional[Path] = None

    def __post_init__(self):
        if len(set(self.sizes)) < 3:
            raise SpecError(f"scaling needs at least 3 distinct sizes, got {self.sizes}")
        if min(self.sizes) < 2:
            raise SpecError("scaling sizes must be >= 2")
        if self.trials < 1:
            raise SpecError(f"trials must be >= 1, got {self.trials}")
        for kind in self.solvers:
            if kind not in (SolverKind.CIM, SolverKind.SA, SolverKind.SG3, SolverKind.BLS, SolverKind.DESCENT):
                raise SpecError(f"solver {kind!r} has no scaling protocol")
        self.sizes = sorted(set(int(n) for n in self.sizes))

    def entry(self, kind: str) -> SolverEntry:
        params = {SolverKind.CIM: self.cim, SolverKind.SA: self.sa, SolverKind.BLS: self.bls}
        return SolverEntry(kind, kind, dict(params.get(kind, {})))


@dataclass
class ScalingReport:
    table: pd.DataFrame
    exponents: pd.DataFrame

    def exponent(self, solver: str, metric: str) -> float:
        match = self.exponents[
            (self.exponents["solver"] == solver) & (self.exponents["metric"] == metric)
        ]
        return float(match["exponent"].iloc[0]) if len(match) else math.nan


def time_sg3(graph: Graph, min_seconds: float = _SG3_MIN_SECONDS) -> float:
    """Mean seconds per sg3_run, repeated until min_seconds have elapsed"""
    sg3_run(graph)
    repeats = 0
    start = time.perf_counter()
    while True:
        sg3_run(graph)
        repeats += 1
        elapsed = time.perf_counter() - start
        if elapsed >= min_seconds:
            return elapsed / repeats


def scaling_report(
    spec: ScalingSpec,
    logger: Optional[Logger] = None,
    config: Optional[Config] = None,
) -> ScalingReport:
    """
    For every size: a +-1 complete graph, its GW energy as target, then each solver's
    trials stopped at the target. CIM work is round trips (time on the simulated
    clock), SA/BLS work is flips (time on the wall clock), SG3 is timed directly.
    Solvers in spec.full_budget run their whole budget instead; a trial counts if
    it ends at or below the target and is charged the full run.
    """
    logger = logger or silent_logger()
    config = config or Config()
    records = []
    for n in spec.sizes:
        graph = gen_complete_pm1(n, derive_seed(spec.master_seed, "graph", n))
        report = gw_run(graph, GwConfig(**spec.gw), derive_seed(spec.master_seed, "gw", n), logger)
        target = report.cut.ising_energy
        logger.progress(f"N={n}: GW target energy {target:g}")

        for kind in spec.solvers:
            if kind == SolverKind.SG3:
                seconds = time_sg3(graph)
                reached = sg3_run(graph).ising_energy <= target
                records.append(
                    {
                        "solver": kind, "n": n, "m": graph.n_edges, "trials": 1,
                        "successes": int(reached), "work_unit": "runs",
                        "protocol": "single-run",
                        "mean_work_to_target": math.nan, "mean_time_to_target": seconds,
                        "time_base": TimeBase.WALL_CLOCK, "target_energy": target,
                    }
                )
                continue

            entry = spec.entry(kind)
            runner = build_runner(entry, config.roundtrip_seconds)
            whole = kind in spec.full_budget
            stop = None if whole else target

            def work(k, runner=runner, kind=kind, n=n, graph=graph, stop=stop):
                trace, _ = runner(graph, derive_seed(spec.master_seed, kind, n, k), stop)
                return trace

            traces = _map_ordered(config.workers, work, list(range(spec.trials)))
            if whole:
                done = [tr for tr in traces if work_to_target(tr, target) is not None]
                works = [float(tr.total_work) for tr in done]
                times = [float(tr.time_seconds[-1]) for tr in done]
            else:
                works = [w for w in (work_to_target(tr, target) for tr in traces) if w is not None]
                times = [t for t in (time_to_target(tr, target) for tr in traces) if t is not None]
            records.append(
                {
                    "solver": kind, "n": n, "m": graph.n_edges, "trials": spec.trials,
                    "successes": len(works), "work_unit": traces[0].work_unit,
                    "protocol": "full-budget" if whole else "stop-at-target",
                    "mean_work_to_target": _mean_or_nan(works),
                    "mean_time_to_target": _mean_or_nan(times),
                    "time_base": traces[0].time_base, "target_energy": target,
                }
            )
            logger.progress(f"N={n} {kind}: {len(works)}/{spec.trials} reached target")

    table = pd.DataFrame(records)
    fits = []
    for kind in spec.solvers:
        rows = table[table["solver"] == kind]
        for metric in ("mean_work_to_target", "mean_time_to_target"):
            usable = rows[np.isfinite(rows[metric]) & (rows[metric] > 0)]
            exponent = math.nan
            if len(usable) >= 2:
                exponent = fit_exponent(usable["n"], usable[metric])
            elif rows[metric].notna().any():
                logger.warning(f"{kind}: too few sizes reached the target to fit {metric}")
            fits.append(
                {"solver": kind, "metric": metric, "exponent": exponent, "points": len(usable)}
            )
    exponents = pd.DataFrame(fits)
    for fit in fits:
        if not math.isnan(fit["exponent"]):
            logger.success(f"{fit['solver']} {fit['metric']}: exponent {fit['exponent']:.2f}")

    if spec.out_dir is not None:
        out_dir = Path(spec.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        table.to_csv(out_dir / FileNames.SCALING, index=False)
        exponents.to_csv(out_dir / FileNames.SCALING_FIT, index=False)
        logger.success(f"Scaling report written to {out_dir}")
    return ScalingReport(table, exponents)
