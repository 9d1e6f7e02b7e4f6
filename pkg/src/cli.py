#!/usr/bin/env python3
"""
cimbench - Command Line Interface
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional, Tuple

from config import SolverKind, TargetRule
from core.bench import CIM_PRESETS
from utils.colors import Colors
from utils.logger import Logger, VerbosityLevel

COMMANDS = ("solve", "bench", "scaling", "gen", "oracle", "demo", "fetch")

# solver kinds each budget flag applies to
_BUDGET_KINDS = {
    "budget_roundtrips": (SolverKind.CIM,),
    "budget_flips": (SolverKind.SA, SolverKind.BLS, SolverKind.DESCENT),
    "budget_seconds": (SolverKind.SA, SolverKind.BLS, SolverKind.DESCENT),
}


def target_arg(text: str) -> Tuple[str, Optional[float]]:
    """--target gw | energy=E | none"""
    if text == "gw":
        return TargetRule.GW_ENERGY, None
    if text == "none":
        return TargetRule.FIXED_BUDGET, None
    key, sep, value = text.partition("=")
    if key == "energy" and sep:
        try:
            return TargetRule.FIXED_ENERGY, float(value)
        except ValueError:
            pass
    raise argparse.ArgumentTypeError(f"expected gw, energy=E or none, got {text!r}")


class CLI:
    """Command Line Interface for cimbench"""

    def __init__(self):
        self.parser = self._create_parser()
        self.logger = Logger()

    def _create_parser(self) -> argparse.ArgumentParser:
        """Create and configure argument parser"""
        parser = argparse.ArgumentParser(
            prog="cimbench",
            description="cimbench - MAX-CUT on a simulated coherent Ising machine, "
            "benchmarked against SA, SG3, BLS and Goemans-Williamson",
            epilog="Examples:\n"
            "  cimbench solve --solver cim --instance gset:g11 --trials 20\n"
            "  cimbench bench spec.json --out results/\n"
            "  cimbench scaling --sizes 40 80 160 320\n",
            formatter_class=argparse.RawDescriptionHelpFormatter,
        )

        # Options every sub-command understands
        common = argparse.ArgumentParser(add_help=False)
        common.add_argument(
            "-v",
            "--verbosity",
            type=int,
            choices=[0, 1, 2, 3],
            default=2,
            help="Verbosity level: 0=errors only, 1=+results, 2=+progress, 3=all "
            "(default: 2)",
        )
        common.add_argument(
            "--workers",
            type=int,
            help="Trials run concurrently (default: $CIMBENCH_WORKERS or 1)",
            metavar="N",
        )

        sub = parser.add_subparsers(dest="command", metavar="COMMAND")

        # solve
        solve = sub.add_parser(
            "solve", parents=[common], help="Run one solver on one instance"
        )
        main_group = solve.add_argument_group("Main options")
        main_group.add_argument(
            "-s",
            "--solver",
            choices=SolverKind.ALL,
            default=SolverKind.CIM,
            help="Solver to run (default: cim)",
        )
        main_group.add_argument(
            "-i",
            "--instance",
            required=True,
            help="G-set file, gset:NAME, complete:N[:seed], random:N:p[:seed] "
            "or torus:RxC[:seed]",
            metavar="REF",
        )
        main_group.add_argument(
            "--preset",
            choices=sorted(CIM_PRESETS),
            help="CIM parameter preset",
        )
        self._add_run_options(solve)
        self._add_budget_options(solve)

        # bench
        bench = sub.add_parser(
            "bench", parents=[common], help="Run a benchmark spec file"
        )
        bench.add_argument("spec", type=Path, help="Benchmark spec (JSON)")
        bench_group = bench.add_argument_group("Overrides")
        bench_group.add_argument(
            "-o", "--out", type=Path, help="Output directory", metavar="DIR"
        )
        bench_group.add_argument("--trials", type=int, help="Trials per solver")
        bench_group.add_argument("--seed", type=int, help="Master seed")

        # scaling
        scaling = sub.add_parser(
            "scaling",
            parents=[common],
            help="Time-to-target against size on +-1 complete graphs",
        )
        scaling_group = scaling.add_argument_group("Scaling options")
        scaling_group.add_argument(
            "--sizes",
            type=int,
            nargs="+",
            default=[40, 80, 160, 320, 640],
            help="Graph sizes (at least 3 distinct; default: 40 80 160 320 640)",
            metavar="N",
        )
        scaling_group.add_argument(
            "--solver",
            dest="solvers",
            nargs="+",
            choices=[SolverKind.CIM, SolverKind.SA, SolverKind.SG3, SolverKind.BLS,
                     SolverKind.DESCENT],
            default=[SolverKind.CIM, SolverKind.SA, SolverKind.SG3],
            help="Solvers to scale (default: cim sa sg3)",
        )
        scaling_group.add_argument(
            "--trials", type=int, default=20, help="Trials per size (default: 20)"
        )
        scaling_group.add_argument(
            "--seed", type=int, default=0, help="Master seed (default: 0)"
        )
        scaling_group.add_argument(
            "-o", "--out", type=Path, help="Output directory", metavar="DIR"
        )
        scaling_group.add_argument(
            "--budget-roundtrips", type=int, help="CIM round trips per trial", metavar="R"
        )
        scaling_group.add_argument(
            "--budget-flips", type=int, help="SA flips per trial", metavar="F"
        )

        # gen
        gen = sub.add_parser(
            "gen", parents=[common], help="Write a generated instance as a G-set file"
        )
        gen.add_argument(
            "instance",
            help="complete:N[:seed], random:N:p[:seed] or torus:RxC[:seed]",
            metavar="REF",
        )
        gen.add_argument(
            "-o",
            "--output",
            type=Path,
            required=True,
            help="Output G-set file",
            metavar="FILE",
        )

        # oracle
        oracle = sub.add_parser(
            "oracle", parents=[common], help="Exact MAX-CUT by enumeration (N <= 24)"
        )
        oracle.add_argument("instance", help="Instance reference", metavar="REF")

        # demo
        demo = sub.add_parser(
            "demo",
            parents=[common],
            help="Ground-state histograms of the N=4 machines",
        )
        demo.add_argument(
            "model",
            choices=["k4", "four-body"],
            help="k4: two-body MAX-CUT-3; four-body: J_1234 = -1",
        )
        demo.add_argument(
            "--trials", type=int, default=1000, help="Independent runs (default: 1000)"
        )
        demo.add_argument("--seed", type=int, default=0, help="Seed (default: 0)")
        demo.add_argument(
            "-o", "--out", type=Path, help="Write the histogram as CSV", metavar="FILE"
        )

        # fetch
        fetch = sub.add_parser(
            "fetch", parents=[common], help="Download G-set graphs into the cache"
        )
        fetch.add_argument("names", nargs="+", help="G-set names (g1, g11, ...)")

        return parser

    @staticmethod
    def _add_run_options(parser: argparse.ArgumentParser) -> None:
        group = parser.add_argument_group("Run options")
        group.add_argument("--seed", type=int, default=0, help="Master seed (default: 0)")
        group.add_argument(
            "-n", "--trials", type=int, default=10, help="Independent trials (default: 10)"
        )
        group.add_argument(
            "--target",
            type=target_arg,
            default=(TargetRule.GW_ENERGY, None),
            help="Reference energy: gw, energy=E or none (default: gw)",
            metavar="{gw|energy=E|none}",
        )
        group.add_argument(
            "--stop-at-target",
            action="store_true",
            help="End each trial once the target is reached",
        )
        group.add_argument(
            "-o", "--out", type=Path, help="Write reports to this directory", metavar="DIR"
        )

    @staticmethod
    def _add_budget_options(parser: argparse.ArgumentParser) -> None:
        group = parser.add_argument_group("Budget options")
        group.add_argument(
            "--budget-roundtrips",
            type=int,
            help="CIM round trips per trial",
            metavar="R",
        )
        group.add_argument(
            "--budget-flips",
            type=int,
            help="Proposed flips per trial (sa, bls, descent)",
            metavar="F",
        )
        group.add_argument(
            "--budget-seconds",
            type=float,
            help="Wall-clock seconds per trial (sa, bls, descent)",
            metavar="S",
        )

    def parse_args(self, args: Optional[List[str]] = None) -> argparse.Namespace:
        """Parse command line arguments"""
        parsed_args = self.parser.parse_args(args)

        if parsed_args.command is None:
            self.parser.error("a command is required (" + ", ".join(COMMANDS) + ")")

        # Set logger verbosity
        self.logger.set_verbosity(VerbosityLevel(parsed_args.verbosity))

        # Validate arguments
        self._validate_args(parsed_args)

        return parsed_args

    def _validate_args(self, args: argparse.Namespace) -> None:
        """Validate parsed arguments"""
        if args.workers is not None and args.workers < 1:
            self.parser.error(f"--workers must be >= 1, got {args.workers}")

        if getattr(args, "trials", None) is not None and args.trials < 1:
            self.parser.error(f"--trials must be >= 1, got {args.trials}")

        if args.command == "solve":
            for flag, kinds in _BUDGET_KINDS.items():
                value = getattr(args, flag)
                if value is None:
                    continue
                if args.solver not in kinds:
                    option = "--" + flag.replace("_", "-")
                    self.parser.error(f"{option} does not apply to solver {args.solver}")
                if value <= 0:
                    self.parser.error(f"--{flag.replace('_', '-')} must be positive")
            if args.preset and args.solver != SolverKind.CIM:
                self.parser.error("--preset only applies to solver cim")

        if args.command == "bench" and not args.spec.exists():
            self.parser.error(f"Spec file not found: {args.spec}")

        if args.command == "scaling" and len(set(args.sizes)) < 3:
            self.parser.error("--sizes needs at least 3 distinct values")

    def print_banner(self) -> None:
        """Print application banner"""
        banner = f"""
{Colors.CYAN}╔══════════════════════════════════════════════════════════════╗
║                          cimbench                            ║
║        MAX-CUT on a simulated coherent Ising machine         ║
╚══════════════════════════════════════════════════════════════╝{Colors.ENDC}

{Colors.BLUE}✓{Colors.ENDC} DOPO network simulation with measurement feedback
{Colors.BLUE}✓{Colors.ENDC} SA, SG3, breakout local search and Goemans-Williamson baselines
{Colors.BLUE}✓{Colors.ENDC} Time-to-target benchmarks on G-set and complete graphs
{Colors.BLUE}✓{Colors.ENDC} Scaling exponents from reproducible, seeded runs
"""
        print(banner)

    def handle_no_args(self) -> None:
        """Handle case when no arguments provided"""
        self.print_banner()
        print(
            f"\n{Colors.YELLOW}No arguments provided. "
            f"Use -h/--help for usage information.{Colors.ENDC}"
        )
        print(f"\n{Colors.BLUE}Quick start examples: {Colors.ENDC}")
        print(
            f"  {Colors.GREEN}cimbench demo k4{Colors.ENDC}                           "
            f"# Degenerate ground states of K4"
        )
        print(
            f"  {Colors.GREEN}cimbench solve -i gset:g11 --preset gset{Colors.ENDC}    "
            f"# CIM on G11 against the GW energy"
        )
        print(
            f"  {Colors.GREEN}cimbench oracle random:16:0.5:3{Colors.ENDC}            "
            f"# Exact optimum by enumeration"
        )
        sys.exit(1)
