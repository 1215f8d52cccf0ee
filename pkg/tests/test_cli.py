"""Command line interface: argument handling, outputs, exit codes."""

import subprocess
import sys

import numpy as np
import pytest

from arctree import data_path, read_curve
from arctree.cli import main


@pytest.fixture
def circle_args(tmp_path):
    def build(*extra, algo=None):
        argv = [
            "--params", str(data_path("circle.params")),
            "--initial-point", str(data_path("circle_start.txt")),
            "--outdir", str(tmp_path),
        ]
        if algo:
            argv += ["--algo", algo]
        argv += list(extra)
        return argv

    return build


def test_default_run_writes_a_valid_curve(circle_args, tmp_path, capsys):
    assert main(circle_args()) == 0
    curve = read_curve(tmp_path / "curve.txt")
    assert curve.shape[1] == 2
    assert len(curve) >= 10
    errors = np.abs(curve[:, 0] ** 2 + curve[:, 1] ** 2 - 1.0)
    assert errors.max() <= 1e-10
    out = capsys.readouterr().out
    assert "REACHED_LAMBDA_MAX" in out
    assert "points" in out


def test_serial_algo_also_traverses(circle_args, tmp_path):
    assert main(circle_args(algo="serial-pac")) == 0
    curve = read_curve(tmp_path / "curve.txt")
    assert curve[:, 0].min() <= -0.9


def test_natural_algo_stalls_with_nonzero_exit(circle_args, tmp_path, capsys):
    assert main(circle_args(algo="natural")) == 1
    assert "STEP_UNDERFLOW" in capsys.readouterr().out
    curve = read_curve(tmp_path / "curve.txt")
    assert curve[:, 1].max() <= 1.0 + 1e-10


def test_benchmark_writes_both_curves(circle_args, tmp_path, capsys):
    assert main(circle_args("--benchmark")) == 0
    tree = read_curve(tmp_path / "curve.txt")
    serial = read_curve(tmp_path / "curve_serial.txt")
    assert len(tree) >= 10 and len(serial) >= 10
    out = capsys.readouterr().out
    assert "algorithm" in out and "tree" in out and "serial" in out


def test_missing_params_file_is_a_usage_error(tmp_path, capsys):
    rc = main(
        [
            "--params", str(tmp_path / "nope.params"),
            "--initial-point", str(data_path("circle_start.txt")),
            "--outdir", str(tmp_path),
        ]
    )
    assert rc == 2
    assert "arctree:" in capsys.readouterr().err


def test_bad_params_content_is_a_usage_error(tmp_path, capsys):
    bad = tmp_path / "bad.params"
    bad.write_text("N_DIM 2\nNOT_A_KEY 5\n", encoding="utf-8")
    rc = main(
        [
            "--params", str(bad),
            "--initial-point", str(data_path("circle_start.txt")),
            "--outdir", str(tmp_path),
        ]
    )
    assert rc == 2
    assert "NOT_A_KEY" in capsys.readouterr().err


def test_wrong_point_size_is_a_usage_error(tmp_path, capsys):
    start = tmp_path / "start.txt"
    start.write_text("1 0 0\n", encoding="utf-8")
    rc = main(
        [
            "--params", str(data_path("circle.params")),
            "--initial-point", str(start),
            "--outdir", str(tmp_path),
        ]
    )
    assert rc == 2
    assert "N_DIM" in capsys.readouterr().err


def test_unconverged_start_is_a_runtime_error(tmp_path, capsys):
    start = tmp_path / "start.txt"
    start.write_text("2 0\n", encoding="utf-8")
    rc = main(
        [
            "--params", str(data_path("circle.params")),
            "--initial-point", str(start),
            "--outdir", str(tmp_path),
        ]
    )
    assert rc == 1
    assert "arctree:" in capsys.readouterr().err


def test_unknown_problem_plugin_is_rejected(circle_args, capsys):
    assert main(circle_args("--problem", "no.such.module:thing")) == 2
    assert "arctree:" in capsys.readouterr().err


def test_problem_plugin_via_module_attr(circle_args, tmp_path):
    # the built-in circle, loaded through the generic plugin path
    assert main(circle_args("--problem", "arctree.problems:circle_problem")) == 0
    curve = read_curve(tmp_path / "curve.txt")
    assert len(curve) >= 10


def test_budget_override_changes_the_run(circle_args, tmp_path):
    # A budget of 3 lets each round try only one leaf's scalings, so the
    # tree explores differently than the default budget of 12.
    assert main(circle_args("--budget", "3", "--workers", "2")) == 0
    narrow = read_curve(tmp_path / "curve.txt")
    assert main(circle_args()) == 0
    wide = read_curve(tmp_path / "curve.txt")
    assert narrow.shape != wide.shape or not np.array_equal(narrow, wide)


def test_verbose_params_produce_dot_snapshots(circle_args, tmp_path):
    verbose = tmp_path / "verbose.params"
    text = data_path("circle.params").read_text(encoding="utf-8")
    assert "VERBOSE" not in text
    verbose.write_text(text + "VERBOSE 2\n", encoding="utf-8")
    rc = main(
        [
            "--params", str(verbose),
            "--initial-point", str(data_path("circle_start.txt")),
            "--outdir", str(tmp_path),
        ]
    )
    assert rc == 0
    snapshots = sorted(tmp_path.glob("tree_*.dot"))
    assert snapshots
    assert all(p.read_text(encoding="utf-8").startswith("digraph") for p in snapshots)


def test_module_invocation_smoke(tmp_path):
    proc = subprocess.run(
        [
            sys.executable, "-m", "arctree",
            "--params", str(data_path("circle.params")),
            "--initial-point", str(data_path("circle_start.txt")),
            "--outdir", str(tmp_path),
        ],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "curve.txt").exists()
