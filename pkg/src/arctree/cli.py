"""Command-line front end.

Reads a parameter file and an initial point, runs the chosen
continuation algorithm, and streams accepted points to
``<outdir>/curve.txt`` (one point per line, 17 significant digits).
Exit status is 0 when the run swept the parameter to its window edge,
2 for usage errors or unreadable inputs, 1 for runs that stopped for
any other reason.
"""

from __future__ import annotations

import argparse
import importlib
import sys
import time
from dataclasses import replace
from pathlib import Path
from typing import Callable

from .baselines import SerialTrace, natural_continuation, serial_pac
from .engine import (
    BootstrapError,
    ContinuationResult,
    TerminationReason,
    run_continuation,
)
from .fileio import parse_parameters, read_initial_point, write_curve_point
from .params import ParameterError, RunParams
from .problem import CurvePoint, ProblemDefinition
from .problems import KsConfig, circle_problem, ks_problem, ks_sink


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="arctree",
        description=(
            "Parameter continuation of F(z) = 0 along a one-dimensional "
            "solution curve, with a speculative predictor tree or one of "
            "two serial baselines."
        ),
    )
    parser.add_argument(
        "--params",
        required=True,
        help="run-parameter file (KEY value lines)",
    )
    parser.add_argument(
        "--initial-point",
        required=True,
        help="file with the starting point, N_DIM whitespace-separated floats",
    )
    parser.add_argument(
        "--problem",
        default="circle",
        help=(
            "built-in problem name (circle, ks) or module:attr naming a "
            "ProblemDefinition or a zero-argument factory for one"
        ),
    )
    parser.add_argument(
        "--algo",
        choices=("pampac", "serial-pac", "natural"),
        default="pampac",
        help=(
            "pampac: the parallel speculative-tree engine; serial-pac: "
            "classic adaptive arclength stepping; natural: parameter "
            "marching (cannot pass folds)"
        ),
    )
    parser.add_argument(
        "--outdir",
        default=".",
        help="directory for curve.txt and tree snapshots (created if absent)",
    )
    parser.add_argument(
        "--budget",
        type=int,
        default=None,
        help="override the logical worker budget from the parameter file",
    )
    parser.add_argument(
        "--workers",
        type=int,
        default=1,
        help="threads used to serve corrector steps (never changes results)",
    )
    parser.add_argument(
        "--benchmark",
        action="store_true",
        help=(
            "run both the tree engine and serial-pac on the same inputs, "
            "print a comparison table, and write curve.txt and "
            "curve_serial.txt"
        ),
    )
    parser.add_argument(
        "--ks-amplitude",
        type=float,
        default=8.09,
        help="forcing amplitude A for the built-in ks problem",
    )
    return parser


def resolve_problem(
    spec: str,
    params: RunParams,
    initial_point,
    ks_amplitude: float,
) -> tuple[ProblemDefinition, Callable[[CurvePoint], None] | None]:
    """Build the problem and an optional per-point refresh hook."""
    if spec == "circle":
        return circle_problem(), None
    if spec == "ks":
        n = params.n_dim - 2
        config = KsConfig(
            n_grid=n,
            amplitude=ks_amplitude,
            reference_profile=initial_point[:n],
        )
        return ks_problem(config), ks_sink(config)
    if ":" in spec:
        module_name, attr = spec.split(":", 1)
        module = importlib.import_module(module_name)
        obj = getattr(module, attr)
        problem = obj() if callable(obj) and not isinstance(obj, ProblemDefinition) else obj
        if not isinstance(problem, ProblemDefinition):
            raise ValueError(f"{spec} did not produce a ProblemDefinition")
        return problem, None
    raise ValueError(
        f"unknown problem {spec!r}: use 'circle', 'ks', or 'module:attr'"
    )


def _chain(*sinks):
    active = [s for s in sinks if s is not None]

    def sink(point: CurvePoint) -> None:
        for s in active:
            s(point)

    return sink


def _run_tree(
    problem: ProblemDefinition,
    params: RunParams,
    z0,
    refresh,
    curve_path: Path,
    workers: int,
    outdir: Path,
) -> ContinuationResult:
    with open(curve_path, "w", encoding="utf-8") as fh:

        def writer(point: CurvePoint) -> None:
            write_curve_point(fh, point.z)
            fh.flush()

        return run_continuation(
            problem,
            params,
            z0,
            sink=_chain(refresh, writer),
            n_workers=workers,
            dot_dir=outdir,
        )


def _print_summary(name: str, points: int, steps: int, failures: int, wall: float) -> None:
    print(
        f"{name:<12} {points:>8} {steps:>10} {failures:>10} {wall:>9.3f}"
    )


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        params = parse_parameters(args.params)
        z0 = read_initial_point(args.initial_point)
    except (OSError, ParameterError) as exc:
        print(f"arctree: {exc}", file=sys.stderr)
        return 2
    if z0.shape != (params.n_dim,):
        print(
            f"arctree: initial point has {z0.shape[0]} entries, "
            f"parameter file says N_DIM {params.n_dim}",
            file=sys.stderr,
        )
        return 2
    if args.budget is not None:
        try:
            params = replace(params, worker_budget=args.budget)
        except ParameterError as exc:
            print(f"arctree: {exc}", file=sys.stderr)
            return 2

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    curve_path = outdir / "curve.txt"

    try:
        problem, refresh = resolve_problem(
            args.problem, params, z0, args.ks_amplitude
        )
    except (ImportError, AttributeError, ValueError) as exc:
        print(f"arctree: {exc}", file=sys.stderr)
        return 2

    try:
        if args.benchmark:
            start = time.perf_counter()
            result = _run_tree(
                problem, params, z0, refresh, curve_path, args.workers, outdir
            )
            tree_wall = time.perf_counter() - start
            # Fresh closure: the tree run may have moved problem-internal
            # anchors, and the serial run must start from the same state.
            serial_problem, serial_refresh = resolve_problem(
                args.problem, params, z0, args.ks_amplitude
            )
            start = time.perf_counter()
            serial: SerialTrace = serial_pac(
                serial_problem, params, z0, sink=serial_refresh
            )
            serial_wall = time.perf_counter() - start
            with open(outdir / "curve_serial.txt", "w", encoding="utf-8") as fh:
                for point in serial.accepted_points:
                    write_curve_point(fh, point.z)
            print(
                f"{'algorithm':<12} {'points':>8} {'steps':>10} "
                f"{'failures':>10} {'wall_s':>9}"
            )
            _print_summary(
                "tree",
                len(result.accepted_points),
                result.corrector_steps_total,
                result.nodes_failed,
                tree_wall,
            )
            _print_summary(
                "serial",
                len(serial.accepted_points),
                serial.corrector_steps_total,
                serial.failed_predictors,
                serial_wall,
            )
            reason = result.termination_reason
        elif args.algo == "pampac":
            result = _run_tree(
                problem, params, z0, refresh, curve_path, args.workers, outdir
            )
            reason = result.termination_reason
            print(
                f"{len(result.accepted_points)} points, "
                f"{result.rounds_executed} rounds, "
                f"{result.corrector_steps_total} corrector steps, "
                f"{result.nodes_failed} failed nodes: {reason.value}"
            )
        else:
            if args.algo == "serial-pac":
                trace = serial_pac(problem, params, z0, sink=refresh)
            else:
                trace = natural_continuation(problem, params, z0)
            with open(curve_path, "w", encoding="utf-8") as fh:
                for point in trace.accepted_points:
                    write_curve_point(fh, point.z)
            reason = trace.termination_reason
            print(
                f"{len(trace.accepted_points)} points, "
                f"{trace.corrector_steps_total} corrector steps, "
                f"{trace.failed_predictors} failed predictors: {reason.value}"
            )
    except BootstrapError as exc:
        print(f"arctree: {exc}", file=sys.stderr)
        return 1

    return 0 if reason is TerminationReason.REACHED_LAMBDA_MAX else 1


if __name__ == "__main__":
    sys.exit(main())
