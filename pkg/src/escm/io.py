"""Flat-file formats: numeric CSV, DAG text files and ``key = value`` configs."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .graph import Dag


class DataError(ValueError):
    """Malformed input data (bad CSV cell, unreadable DAG file, ...)."""


@dataclass(frozen=True)
class Sample:
    """An ``n x d`` matrix of observations with column labels."""

    values: np.ndarray
    column_names: tuple[str, ...]

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]


def _parse_float(cell: str) -> float | None:
    try:
        x = float(cell)
    except ValueError:
        return None
    return x if math.isfinite(x) else None


def load_csv(path: str | Path) -> Sample:
    """Read a comma-separated numeric table.

    The first row is treated as a header when any of its cells is not a
    number. Blank lines are skipped. A malformed cell raises
    :class:`DataError` naming its 1-based data row and column.
    """
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise DataError(f"{path}: no data")

    names = None
    if any(_parse_float(c.strip()) is None for c in rows[0]):
        names = tuple(c.strip() for c in rows[0])
        rows = rows[1:]
    if not rows:
        raise DataError(f"{path}: header only, no data rows")

    width = len(names) if names is not None else len(rows[0])
    data = np.empty((len(rows), width))
    for i, row in enumerate(rows, start=1):
        if len(row) != width:
            raise DataError(f"{path}: row {i} has {len(row)} columns, expected {width}")
        for j, cell in enumerate(row, start=1):
            x = _parse_float(cell.strip())
            if x is None:
                raise DataError(f"{path}: non-numeric or non-finite value {cell!r} at row {i}, column {j}")
            data[i - 1, j - 1] = x
    if names is None:
        names = tuple(f"col{j}" for j in range(1, width + 1))
    return Sample(data, names)


def write_csv(path: str | Path, values: np.ndarray, column_names: Sequence[str] | None = None) -> None:
    values = np.atleast_2d(np.asarray(values, dtype=float))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        if column_names is not None:
            writer.writerow(column_names)
        for row in values:
            writer.writerow([repr(float(x)) for x in row])


def format_dag(dag: Dag) -> str:
    lines = [f"d={dag.node_count}"]
    lines += [f"{u} {v}" for u, v in sorted(dag.edges)]
    return "\n".join(lines) + "\n"


def parse_dag(text: str) -> Dag:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or not lines[0].replace(" ", "").startswith("d="):
        raise DataError("DAG file must start with a 'd=<int>' line")
    try:
        d = int(lines[0].replace(" ", "")[2:])
    except ValueError:
        raise DataError(f"bad node count line {lines[0]!r}") from None
    edges = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise DataError(f"bad edge line {ln!r}; expected 'u v'")
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise DataError(f"bad edge line {ln!r}; node ids must be integers") from None
    try:
        return Dag(d, edges)
    except ValueError as exc:
        raise DataError(str(exc)) from None


def read_dag(path: str | Path) -> Dag:
    return parse_dag(Path(path).read_text())


def write_dag(path: str | Path, dag: Dag) -> None:
    Path(path).write_text(format_dag(dag))


def parse_key_values(text: str) -> tuple[dict[str, str], list[list[str]]]:
    """Split ``key = value`` lines from bare directive lines (e.g. ``edge 1 2 0.5``).

    ``#`` starts a comment. Repeated keys are an error.
    """
    pairs: dict[str, str] = {}
    directives: list[list[str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line:
            key, _, value = line.partition("=")
            key = key.strip().lower().replace("-", "_")
            if key in pairs:
                raise DataError(f"line {lineno}: duplicate key {key!r}")
            pairs[key] = value.strip()
        else:
            directives.append(line.split())
    return pairs, directives
