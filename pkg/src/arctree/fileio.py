"""Plain-text formats: parameter files, point files, and DOT snapshots.

Parameter files hold one ``KEY value`` pair per line; ``#`` starts a
comment and blank lines are skipped.  The step scalings are given one
per line as SCALE_PROCESS_0 .. SCALE_PROCESS_{W-1} and their count must
match MAX_CHILDREN.  Point files hold whitespace-separated floats, one
curve point per line, printed with 17 significant digits so a write and
read round trip is exact.
"""

from __future__ import annotations

import os
from pathlib import Path
from typing import IO, Iterable

import numpy as np

from .params import ParameterError, RunParams
from .tree import TreeNode, iter_nodes

_INT_KEYS = {
    "N_DIM": "n_dim",
    "LAMBDA_INDEX": "lambda_index",
    "MAX_ITER": "max_iter",
    "MAX_DEPTH": "max_depth",
    "MAX_CHILDREN": "max_children",
    "VERBOSE": "verbose",
}

_FLOAT_KEYS = {
    "LAMBDA_MIN": "lambda_min",
    "LAMBDA_MAX": "lambda_max",
    "DELTA_LAMBDA": "delta_lambda",
    "H_MIN": "h_min",
    "H_MAX": "h_max",
    "H_INIT": "h_init",
    "TOL_RESIDUAL": "tol_residual",
    "MU": "mu",
    "GAMMA": "gamma",
}

_OPTIONAL_KEYS = {"VERBOSE"}


def _format_float(x: float) -> str:
    return "%.17g" % x


def parse_parameters(path: str | os.PathLike) -> RunParams:
    """Read a run-parameter file.

    Raises ParameterError naming the offending key and line for unknown
    keys, duplicates, bad numbers, missing required keys, or a scaling
    list that is not exactly SCALE_PROCESS_0 .. SCALE_PROCESS_{W-1}.
    """
    path = Path(path)
    seen: dict[str, float | int] = {}
    scalings: dict[int, float] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ParameterError(
                    f"{path.name}:{lineno}: expected 'KEY value', got {raw.strip()!r}"
                )
            key, text = parts
            if key.startswith("SCALE_PROCESS_"):
                suffix = key[len("SCALE_PROCESS_") :]
                if not suffix.isdigit():
                    raise ParameterError(
                        f"{path.name}:{lineno}: bad scaling key {key!r}"
                    )
                index = int(suffix)
                if index in scalings:
                    raise ParameterError(
                        f"{path.name}:{lineno}: duplicate key {key!r}"
                    )
                try:
                    scalings[index] = float(text)
                except ValueError as exc:
                    raise ParameterError(
                        f"{path.name}:{lineno}: bad value for {key}: {text!r}"
                    ) from exc
                continue
            if key not in _INT_KEYS and key not in _FLOAT_KEYS:
                raise ParameterError(f"{path.name}:{lineno}: unknown key {key!r}")
            if key in seen:
                raise ParameterError(f"{path.name}:{lineno}: duplicate key {key!r}")
            try:
                if key in _INT_KEYS:
                    seen[key] = int(text)
                else:
                    seen[key] = float(text)
            except ValueError as exc:
                raise ParameterError(
                    f"{path.name}:{lineno}: bad value for {key}: {text!r}"
                ) from exc

    required = (set(_INT_KEYS) | set(_FLOAT_KEYS)) - _OPTIONAL_KEYS
    missing = sorted(required - set(seen))
    if missing:
        raise ParameterError(f"{path.name}: missing required key(s): {', '.join(missing)}")

    n_children = int(seen["MAX_CHILDREN"])
    expected = set(range(n_children))
    if set(scalings) != expected:
        got = ", ".join(f"SCALE_PROCESS_{i}" for i in sorted(scalings)) or "none"
        raise ParameterError(
            f"{path.name}: need SCALE_PROCESS_0 .. SCALE_PROCESS_{n_children - 1} "
            f"to match MAX_CHILDREN={n_children}, got: {got}"
        )

    kwargs = {field: seen[key] for key, field in _INT_KEYS.items() if key in seen}
    kwargs.update(
        {field: seen[key] for key, field in _FLOAT_KEYS.items() if key in seen}
    )
    kwargs["scalings"] = tuple(scalings[i] for i in range(n_children))
    return RunParams(**kwargs)


def write_parameters(params: RunParams, path: str | os.PathLike) -> None:
    """Write a parameter file that parse_parameters reads back exactly.

    Only file-representable settings are written; the worker budget and
    round limit are run options, not file keys.
    """
    lines = []
    for key, field in _INT_KEYS.items():
        lines.append(f"{key} {getattr(params, field)}")
    for key, field in _FLOAT_KEYS.items():
        lines.append(f"{key} {_format_float(getattr(params, field))}")
    for i, scale in enumerate(params.scalings):
        lines.append(f"SCALE_PROCESS_{i} {_format_float(scale)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_initial_point(path: str | os.PathLike) -> np.ndarray:
    """Read a single point: whitespace-separated floats, comments allowed."""
    values = np.loadtxt(path, comments="#", dtype=float)
    return np.atleast_1d(values).ravel()


def format_point(z: np.ndarray) -> str:
    return " ".join(_format_float(v) for v in np.asarray(z).ravel())


def write_curve_point(fh: IO[str], z: np.ndarray) -> None:
    fh.write(format_point(z) + "\n")


def write_curve(path: str | os.PathLike, points: Iterable[np.ndarray]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for z in points:
            write_curve_point(fh, z)


def read_curve(path: str | os.PathLike) -> np.ndarray:
    """Read a curve file as a (n_points, n_dim) array."""
    return np.loadtxt(path, comments="#", dtype=float, ndmin=2)


def export_dot(
    root: TreeNode, round_index: int, directory: str | os.PathLike
) -> Path:
    """Write the tree as Graphviz DOT, one file per round.

    Nodes are written in depth-first order, filled with their color and
    labeled with the iteration count, step length, and current residual
    norm.  Edges follow child order.  Returns the file path,
    ``tree_<round>.dot`` inside the directory.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    ids: dict[TreeNode, int] = {}
    lines = [f"digraph round_{round_index} {{", "  node [style=filled];"]
    for node in iter_nodes(root):
        ids[node] = len(ids)
        label = (
            f"nu={node.nu} h={node.h_init:.3g} r={node.residual_norm_current:.3g}"
        )
        extra = ", fontcolor=white" if node.color.value == "black" else ""
        lines.append(
            f'  n{ids[node]} [label="{label}", fillcolor={node.color.value}{extra}];'
        )
    for node in iter_nodes(root):
        for child in node.children:
            lines.append(f"  n{ids[node]} -> n{ids[child]};")
    lines.append("}")
    out = directory / f"tree_{round_index}.dot"
    out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return out
