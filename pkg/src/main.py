#!/usr/bin/env python3
"""
cimbench - Main application
"""

import signal
import sys
from itertools import combinations

import numpy as np

from cli import CLI
from config import Config, Presets, SolverKind, TargetRule
from core.bench import (
    BenchmarkResult,
    BenchmarkRunner,
    BenchmarkSpec,
    ScalingSpec,
    SolverEntry,
    scaling_report,
)
from core.cim import (
    CimParams,
    sample_final_spins,
    sample_four_body_spins,
    spin_label,
    state_histogram,
)
from core.graph import Graph, brute_force_maxcut, ground_states, save_gset
from core.instances import InstanceManager
from exceptions import CimBenchError, InstanceError
from utils.logger import Logger, VerbosityLevel

_SUMMARY_COLUMNS = [
    "instance",
    "solver",
    "trials",
    "best_cut",
    "mean_cut",
    "normalized_best",
    "success_count",
    "mean_work_to_target",
    "mean_time_to_target",
]


class CimBench:
    """Main cimbench application"""

    def __init__(self):
        self.cli = CLI()
        self.logger = Logger()
        self.config = Config()

    def run(self, args=None) -> int:
        """Run the application"""
        parsed_args = None
        try:
            # Setup signal handler
            signal.signal(signal.SIGINT, self._signal_handler)

            # Parse arguments
            if not args and len(sys.argv) == 1:
                self.cli.handle_no_args()
                return 1

            parsed_args = self.cli.parse_args(args)

            # Update logger verbosity
            self.logger.set_verbosity(VerbosityLevel(parsed_args.verbosity))
            if parsed_args.workers is not None:
                self.config.workers = parsed_args.workers

            handlers = {
                "solve": self._handle_solve,
                "bench": self._handle_bench,
                "scaling": self._handle_scaling,
                "gen": self._handle_gen,
                "oracle": self._handle_oracle,
                "demo": self._handle_demo,
                "fetch": self._handle_fetch,
            }
            return handlers[parsed_args.command](parsed_args)

        except KeyboardInterrupt:
            self.logger.warning("Operation cancelled by user")
            return 1
        except CimBenchError as e:
            self.logger.error(str(e))
            return 1
        except Exception as e:
            self.logger.error(f"Unexpected error: {e}")
            if parsed_args and parsed_args.verbosity >= 3:
                import traceback

                self.logger.debug(traceback.format_exc())
            return 1

    def _solver_entry(self, args) -> SolverEntry:
        """Solver entry of `solve`, budget flags folded into its parameters"""
        params = {}
        if args.solver == SolverKind.CIM and args.budget_roundtrips is not None:
            params["round_trips"] = args.budget_roundtrips
        if args.solver == SolverKind.SA:
            if args.budget_flips is not None:
                params["total_flips"] = args.budget_flips
            if args.budget_seconds is not None:
                params["time_budget"] = args.budget_seconds
        if args.solver in (SolverKind.BLS, SolverKind.DESCENT):
            if args.budget_flips is not None:
                params["flip_budget"] = args.budget_flips
            if args.budget_seconds is not None:
                params["time_budget"] = args.budget_seconds

        item = {"kind": args.solver, "params": params}
        if args.preset:
            item["preset"] = args.preset
        return SolverEntry.from_json(item)

    def _handle_solve(self, args) -> int:
        rule, energy = args.target
        spec = BenchmarkSpec(
            instances=[args.instance],
            solvers=[self._solver_entry(args)],
            trials=args.trials,
            target=rule,
            target_energy=energy,
            master_seed=args.seed,
            out_dir=args.out,
            stop_at_target=args.stop_at_target and rule != TargetRule.FIXED_BUDGET,
        )
        result = BenchmarkRunner(self.logger, self.config).run(
            spec, write=args.out is not None
        )
        self._print_summary(result)
        return 0

    def _handle_bench(self, args) -> int:
        spec = BenchmarkSpec.from_json(args.spec)
        if args.out is not None:
            spec.out_dir = args.out
        if args.trials is not None:
            spec.trials = args.trials
        if args.seed is not None:
            spec.master_seed = args.seed

        self.logger.info(
            f"Benchmark: {len(spec.instances)} instance reference(s), "
            f"{len(spec.solvers)} solver(s), {spec.trials} trials each"
        )
        result = BenchmarkRunner(self.logger, self.config).run(spec)
        self._print_summary(result)
        return 0

    def _handle_scaling(self, args) -> int:
        cim = dict(Presets.COMPLETE_CIM)
        sa = dict(Presets.COMPLETE_SA)
        if args.budget_roundtrips is not None:
            cim["round_trips"] = args.budget_roundtrips
        if args.budget_flips is not None:
            sa.pop("sweeps", None)
            sa["total_flips"] = args.budget_flips

        spec = ScalingSpec(
            sizes=args.sizes,
            trials=args.trials,
            solvers=args.solvers,
            master_seed=args.seed,
            cim=cim,
            sa=sa,
            out_dir=args.out or self.config.out_dir,
        )
        report = scaling_report(spec, self.logger, self.config)
        if self.logger.verbosity >= VerbosityLevel.LOW:
            print(report.table.to_string(index=False))
            print(report.exponents.to_string(index=False))
        return 0

    def _handle_gen(self, args) -> int:
        if ":" not in args.instance:
            raise InstanceError(f"not a generator reference: {args.instance}")
        manager = InstanceManager(self.logger, self.config)
        instance = manager.resolve(args.instance)[0]
        save_gset(instance.graph, args.output)
        self.logger.success(f"{instance.name} ({instance.graph}) written to {args.output}")
        return 0

    def _handle_oracle(self, args) -> int:
        manager = InstanceManager(self.logger, self.config)
        for instance in manager.resolve(args.instance):
            best = brute_force_maxcut(instance.graph)
            optimal = ground_states(instance.graph)
            self.logger.success(
                f"{instance.name}: max cut {best.cut_value:g}, "
                f"Ising energy {best.ising_energy:g}, "
                f"{len(optimal)} optimal configurations"
            )
            self.logger.info(f"spins {spin_label(best.spins)}")
        return 0

    def _handle_demo(self, args) -> int:
        if args.model == "k4":
            graph = Graph.from_edges(4, [(i, j, 1.0) for i, j in combinations(range(4), 2)])
            params = CimParams.from_dict(Presets.K4_DEMO)
            self.logger.info(f"K4 MAX-CUT-3: {args.trials} runs, {params}")
            spins = sample_final_spins(graph, params, args.trials, args.seed)
            wanted = {spin_label(row) for row in ground_states(graph)}
            hits = sum(spin_label(row) in wanted for row in spins)
        else:
            params = CimParams.from_dict(Presets.FOUR_BODY_DEMO)
            self.logger.info(f"Four-body J_1234 = -1: {args.trials} runs, {params}")
            spins = sample_four_body_spins(-1.0, params, args.trials, args.seed)
            hits = int(np.sum(np.prod(spins, axis=1) == -1))

        histogram = state_histogram(spins)
        for row in histogram.itertuples(index=False):
            self.logger.success(f"{row.state}  {row.count:6d}  ({row.fraction:.3f})")
        self.logger.success(
            f"{hits}/{args.trials} runs ended in a ground state "
            f"({len(histogram)} distinct configurations)"
        )
        if args.out is not None:
            args.out.parent.mkdir(parents=True, exist_ok=True)
            histogram.to_csv(args.out, index=False)
            self.logger.success(f"Histogram written to {args.out}")
        return 0

    def _handle_fetch(self, args) -> int:
        manager = InstanceManager(self.logger, self.config)
        for name in args.names:
            manager.fetch_gset(name)
        return 0

    def _print_summary(self, result: BenchmarkResult) -> None:
        if self.logger.verbosity < VerbosityLevel.LOW:
            return
        frame = result.summary_frame()
        print(frame[_SUMMARY_COLUMNS].to_string(index=False))

    def _signal_handler(self, signum, frame):
        """Handle Ctrl+C"""
        self.logger.warning("\nOperation cancelled by user")
        sys.exit(1)


def main():
    """Main entry point"""
    app = CimBench()
    return app.run()


if __name__ == "__main__":
    sys.exit(main())
