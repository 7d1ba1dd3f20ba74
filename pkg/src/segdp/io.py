"""CSV and manifest serialization.

Reals are written with ``repr`` so every value round-trips exactly and
repeated runs under the same seed produce byte-identical files. Line
endings are plain newlines for the same reason.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .core import Assignment, SeriesMatrix
from .errors import ConfigError


def format_real(x: float) -> str:
    return repr(float(x))


def write_series_csv(path, series: SeriesMatrix) -> None:
    lines = [",".join(series.column_roles)]
    for row in series.values:
        lines.append(",".join(format_real(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def load_series_csv(path) -> SeriesMatrix:
    text = Path(path).read_text().strip()
    if not text:
        raise ConfigError(f"{path}: empty series file")
    lines = text.splitlines()
    roles = tuple(name.strip() for name in lines[0].split(","))
    try:
        values = np.array(
            [[float(cell) for cell in line.split(",")] for line in lines[1:]]
        )
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    try:
        return SeriesMatrix(values, roles)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def write_assignment_csv(path, assignment: Assignment) -> None:
    lines = ["index,label"]
    lines.extend(f"{i},{label}" for i, label in enumerate(assignment.labels))
    Path(path).write_text("\n".join(lines) + "\n")


def load_assignment_csv(path) -> Assignment:
    lines = Path(path).read_text().strip().splitlines()
    if not lines or lines[0] != "index,label":
        raise ConfigError(f"{path}: expected an 'index,label' header")
    labels = []
    for line in lines[1:]:
        index, label = line.split(",")
        if int(index) != len(labels):
            raise ConfigError(f"{path}: indices must be consecutive from 0")
        labels.append(int(label))
    return Assignment(np.asarray(labels, dtype=np.int64))


def write_grid_csv(path, points) -> None:
    lines = ["n_grid,c_grid,cost,n_effective,c_effective,converged"]
    for p in points:
        converged = p.result.converged if p.result is not None else False
        lines.append(
            f"{p.n_grid},{p.c_grid},{format_real(p.cost)},"
            f"{p.n_effective},{p.c_effective},{str(converged).lower()}"
        )
    Path(path).write_text("\n".join(lines) + "\n")


def write_json(path, payload) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
