#!/usr/bin/env python3
"""Tree engine vs serial arclength stepping on the 128-mode spectral run.

Both algorithms start from the packaged fixture and use the packaged
parameter file.  The table reports accepted points, corrector rounds
(tree) or corrector steps (serial), failures, and wall time.  The key
column is rounds vs steps: a round advances every in-flight predictor
once, so it is the tree's unit of synchronized latency.
"""

import argparse
import sys
import time
from dataclasses import replace
from pathlib import Path

from arctree import (
    data_path,
    ks_problem,
    ks_sink,
    load_ks_fixture,
    parse_parameters,
    run_continuation,
    serial_pac,
)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--budget", type=int, default=12,
                        help="in-flight predictor budget for the tree run")
    parser.add_argument("--workers", type=int, default=3,
                        help="threads used by the tree's corrector rounds")
    parser.add_argument("--out", type=Path, default=None,
                        help="also write the table to this file")
    args = parser.parse_args(argv)

    params = replace(
        parse_parameters(data_path("ks_n128.params")), worker_budget=args.budget
    )

    z0, config = load_ks_fixture()
    start = time.perf_counter()
    tree = run_continuation(
        ks_problem(config), params, z0, sink=ks_sink(config),
        n_workers=args.workers,
    )
    tree_wall = time.perf_counter() - start

    z0, config = load_ks_fixture()
    start = time.perf_counter()
    serial = serial_pac(ks_problem(config), params, z0, sink=ks_sink(config))
    serial_wall = time.perf_counter() - start

    lines = [
        f"{'algorithm':<10} {'points':>8} {'rounds':>8} {'steps':>8} "
        f"{'failures':>9} {'wall_s':>8}",
        f"{'tree':<10} {len(tree.accepted_points):>8} "
        f"{tree.rounds_executed:>8} {tree.corrector_steps_total:>8} "
        f"{tree.nodes_failed:>9} {tree_wall:>8.2f}",
        f"{'serial':<10} {len(serial.accepted_points):>8} {'-':>8} "
        f"{serial.corrector_steps_total:>8} {serial.failed_predictors:>9} "
        f"{serial_wall:>8.2f}",
    ]
    table = "\n".join(lines)
    print(table)
    print()
    ratio = serial.corrector_steps_total / max(tree.rounds_executed, 1)
    print(
        f"tree rounds / serial steps: {tree.rounds_executed} / "
        f"{serial.corrector_steps_total} (x{ratio:.1f} fewer synchronization "
        f"points)"
    )
    if args.out is not None:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(table + "\n", encoding="utf-8")
        print(f"table written to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
