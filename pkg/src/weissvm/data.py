"""CSV ingestion and export for cylindrical data.

Files have two numeric columns, angle then length, with an optional
``theta,x`` header.  Numbers are written with 17 significant digits so a
write/read round trip is exact.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .models import wrap_angle

__all__ = ["DataError", "Dataset", "load_csv", "write_csv", "format_number"]

ANGLE_UNITS = ("radians", "degrees")


class DataError(ValueError):
    def __init__(self, message, line=None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


@dataclass
class Dataset:
    theta: np.ndarray
    x: np.ndarray
    angle_unit: str = "radians"
    source_path: str = ""

    def __len__(self):
        return self.theta.size


def format_number(v: float) -> str:
    return format(float(v), ".17g")


def _is_header(row):
    return [c.strip().lower() for c in row] == ["theta", "x"]


def load_csv(path, angle_unit: str = "radians") -> Dataset:
    """Read ``theta,x`` rows; angles are converted to radians and wrapped into ``[-pi, pi)``."""
    if angle_unit not in ANGLE_UNITS:
        raise ValueError(f"angle_unit must be one of {ANGLE_UNITS}")
    theta, x = [], []
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if lineno == 1 and _is_header(row):
                continue
            if len(row) != 2:
                raise DataError(f"expected 2 columns, found {len(row)}", lineno)
            try:
                t, v = float(row[0]), float(row[1])
            except ValueError:
                raise DataError(f"non-numeric cell in {row!r}", lineno) from None
            if not (math.isfinite(t) and math.isfinite(v)):
                raise DataError("non-finite value", lineno)
            theta.append(t)
            x.append(v)
    if not theta:
        raise DataError(f"{path}: no observations")
    theta = np.array(theta)
    if angle_unit == "degrees":
        theta = np.deg2rad(theta)
    return Dataset(np.atleast_1d(wrap_angle(theta)), np.array(x), angle_unit, str(path))


def _write_rows(fh, names, cols, header):
    w = csv.writer(fh, lineterminator="\n")
    if header:
        w.writerow(names)
    for row in zip(*cols):
        w.writerow([format_number(v) for v in row])


def write_csv(target, columns: dict, header=True):
    """Write equal-length numeric columns to a path or an open text stream."""
    names = list(columns)
    cols = [np.asarray(columns[n], dtype=float).ravel() for n in names]
    if hasattr(target, "write"):
        _write_rows(target, names, cols, header)
        return
    with open(Path(target), "w", newline="", encoding="utf-8") as fh:
        _write_rows(fh, names, cols, header)
