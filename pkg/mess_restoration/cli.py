# Copyright 2024 The mess-restoration Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Command line entry point: ``mess-restoration <command> ...``

Exit codes: 0 on success, 2 when the case or a setting is invalid, 3 when the
solver fails or an exported model has no solution to import.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from collections.abc import Sequence
from dataclasses import replace
from pathlib import Path

from .case import CaseConfig, CaseValidationError, load_case
from .milp import (
    SolveOptionsError,
    SolverError,
    SolverMode,
    cost_breakdown,
    export_mps,
    marker_path,
    write_marker_csv,
)
from .rolling import (
    FleetMode,
    RollingSettingsError,
    TimelineReport,
    compute_metrics,
    first_horizon_scenarios,
    run,
    solve_once,
    workers_from_env,
)
from .rolling.runner import RollingRun
from .scenario import ScenarioError, ScenarioSettingsError, write_scenarios_csv
from .transport import TravelTimeSettingsError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_SOLVER = 3


def _add_case_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("case", type=Path, help="case JSON file")
    parser.add_argument("--seed", type=int, default=None, help="base seed override")
    parser.add_argument(
        "--mode",
        choices=[mode.value for mode in FleetMode],
        default=None,
        help="fleet mode override",
    )
    parser.add_argument(
        "--workers",
        type=int,
        default=None,
        help="worker threads (default: $MESS_RESTORATION_WORKERS or the case setting)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mess-restoration",
        description=(
            "Rolling stochastic service restoration with mobile energy storage."
        ),
    )
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="more logging, repeatable"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run_parser = commands.add_parser("run", help="full rolling-horizon run")
    _add_case_options(run_parser)
    run_parser.add_argument(
        "--solver", choices=["bundled", "export"], default="bundled"
    )
    run_parser.add_argument("--out", type=Path, default=None, help="output bundle")
    run_parser.add_argument(
        "--solutions",
        type=Path,
        default=None,
        help="directory with roll_ttt.sol files for --solver export",
    )

    once_parser = commands.add_parser(
        "solve-once", help="stochastic solve of the first prediction horizon"
    )
    _add_case_options(once_parser)

    scenario_parser = commands.add_parser(
        "scenarios", help="generate and reduce the first horizon's scenarios"
    )
    _add_case_options(scenario_parser)
    scenario_parser.add_argument("--n", type=int, default=None, help="generated")
    scenario_parser.add_argument("--k", type=int, default=None, help="kept")
    scenario_parser.add_argument("--out", type=Path, default=None, help="CSV file")

    export_parser = commands.add_parser(
        "export-mps", help="write the first horizon's model as MPS"
    )
    _add_case_options(export_parser)
    export_parser.add_argument("--out", type=Path, required=True, help="MPS file")

    report_parser = commands.add_parser(
        "report", help="recompute metrics from a saved output bundle"
    )
    report_parser.add_argument("bundle", type=Path)
    return parser


def _prepare(args: argparse.Namespace) -> tuple[CaseConfig, FleetMode | None]:
    case = load_case(args.case)
    workers = args.workers or workers_from_env(case.rolling.n_threads)
    case = replace(
        case,
        rolling=replace(case.rolling, n_threads=workers),
        solve_options=replace(case.solve_options, n_workers=workers),
    )
    mode = None if args.mode is None else FleetMode(args.mode)
    return case, mode


def _run(args: argparse.Namespace) -> int:
    case, mode = _prepare(args)
    options = case.solve_options
    if args.solver == "export":
        folder = args.out or args.solutions
        if folder is None:
            raise SolveOptionsError("--solver export needs --out or --solutions")
        options = replace(
            options,
            mode=SolverMode.export_only,
            export_path=folder / "roll_000.mps",
        )
    report = run(
        case,
        seed=args.seed,
        mode=mode,
        options=options,
        solutions_dir=args.solutions,
        out_dir=args.out,
    )
    if args.out is not None:
        report.write_bundle(args.out)
    print(compute_metrics(report))  # noqa: T201
    return EXIT_OK


def _solve_once(args: argparse.Namespace) -> int:
    case, mode = _prepare(args)
    problem, solution = solve_once(case, seed=args.seed, mode=mode)
    print(f"{problem.model.model.name}: {solution}")  # noqa: T201
    if not solution.status.has_solution:
        return EXIT_SOLVER
    for term, value in cost_breakdown(problem.model.model, solution.values).items():
        print(f"  {term.value:<16} {value:,.2f}")  # noqa: T201
    return EXIT_OK


def _scenarios(args: argparse.Namespace) -> int:
    case, _ = _prepare(args)
    scenarios = first_horizon_scenarios(case, seed=args.seed, n=args.n, k=args.k)
    total = math.fsum(scenario.probability for scenario in scenarios.scenarios)
    print(  # noqa: T201
        f"{len(scenarios)} scenarios over {scenarios.horizon} intervals,"
        f" probabilities sum to {total:.12g}"
    )
    if scenarios.kantorovich_distance is not None:
        print(  # noqa: T201
            f"Kantorovich distance {scenarios.kantorovich_distance:.6g}"
        )
    if args.out is not None:
        write_scenarios_csv(scenarios, args.out)
    return EXIT_OK


def _export_mps(args: argparse.Namespace) -> int:
    case, mode = _prepare(args)
    rolling = RollingRun(case, seed=args.seed, mode=mode)
    problem = rolling.problem(rolling.initial_state())
    args.out.parent.mkdir(parents=True, exist_ok=True)
    export_mps(problem.model.model, args.out)
    markers = marker_path(args.out)
    write_marker_csv(problem.model.model, markers)
    print(f"{problem.model.model} written to {args.out} and {markers}")  # noqa: T201
    return EXIT_OK


def _report(args: argparse.Namespace) -> int:
    try:
        report = TimelineReport.from_bundle(args.bundle)
    except FileNotFoundError as error:
        print(f"[error] {error}", file=sys.stderr)  # noqa: T201
        return EXIT_INVALID
    print(compute_metrics(report))  # noqa: T201
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=max(logging.WARNING - 10 * args.verbose, logging.DEBUG),
        format="%(levelname)s %(name)s: %(message)s",
    )
    match args.command:
        case "run":
            command = _run
        case "solve-once":
            command = _solve_once
        case "scenarios":
            command = _scenarios
        case "export-mps":
            command = _export_mps
        case "report":
            command = _report
        case _:
            raise ValueError(f"Unknown command {args.command}")
    try:
        return command(args)
    except (
        CaseValidationError,
        RollingSettingsError,
        SolveOptionsError,
        ScenarioSettingsError,
        TravelTimeSettingsError,
        ScenarioError,
    ) as error:
        print(f"[error] {error}", file=sys.stderr)  # noqa: T201
        return EXIT_INVALID
    except SolverError as error:
        print(f"[solver] {error}", file=sys.stderr)  # noqa: T201
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
