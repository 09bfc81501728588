"""File formats: data CSV and sparse-triplet coefficient JSON.

Data CSV: first column is the response, the rest are raw covariates. A
header row is detected by a non-numeric first row. Coefficient JSON stores
the upper triangle as ``{"p": p, "entries": [[j, k, value], ...]}`` with
0-based ``j <= k``; readers mirror it back to a symmetric matrix.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np
from numpy.typing import NDArray


class DataFormatError(ValueError):
    pass


def _parse_float(cell: str, lineno: int, col: int) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise DataFormatError(
            f"line {lineno}, column {col + 1}: non-numeric cell {cell!r}") from None
    if not math.isfinite(value):
        raise DataFormatError(f"line {lineno}, column {col + 1}: non-finite value {cell!r}")
    return value


def _is_numeric_row(row: list[str]) -> bool:
    try:
        [float(c) for c in row]
    except ValueError:
        return False
    return True


def read_data_csv(path: str | Path) -> tuple[NDArray, NDArray, list[str] | None]:
    """Return ``(X_raw, y, header)``; header is None when absent."""
    with open(path, newline="") as fh:
        rows = [(i, r) for i, r in enumerate(csv.reader(fh), start=1) if any(c.strip() for c in r)]
    if not rows:
        raise DataFormatError(f"{path}: no data rows")
    header = None
    if not _is_numeric_row(rows[0][1]):
        header = [c.strip() for c in rows[0][1]]
        rows = rows[1:]
    if not rows:
        raise DataFormatError(f"{path}: no data rows after header")
    width = len(rows[0][1])
    if width < 2:
        raise DataFormatError(f"line {rows[0][0]}: need a response and at least one covariate")
    values = []
    for lineno, row in rows:
        if len(row) != width:
            raise DataFormatError(f"line {lineno}: expected {width} cells, found {len(row)}")
        values.append([_parse_float(c.strip(), lineno, j) for j, c in enumerate(row)])
    arr = np.array(values)
    return arr[:, 1:], arr[:, 0], header


def write_data_csv(path: str | Path, X_raw: NDArray, y: NDArray) -> None:
    header = ["y"] + [f"x{j}" for j in range(1, X_raw.shape[1] + 1)]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for yi, row in zip(y, X_raw):
            w.writerow([repr(float(yi))] + [repr(float(v)) for v in row])


def matrix_to_triplets(B: NDArray, drop_zeros: bool = True) -> dict:
    B = np.asarray(B, dtype=np.float64)
    p = B.shape[0]
    rows, cols = np.triu_indices(p)
    entries = [[int(j), int(k), float(B[j, k])] for j, k in zip(rows, cols)
               if not (drop_zeros and B[j, k] == 0)]
    return {"p": p, "entries": entries}


def triplets_to_matrix(obj: dict) -> NDArray:
    p = int(obj["p"])
    B = np.zeros((p, p))
    for j, k, v in obj["entries"]:
        j, k = int(j), int(k)
        if not (0 <= j <= k < p):
            raise DataFormatError(f"bad triplet index ({j}, {k}) for p={p}")
        B[j, k] = B[k, j] = float(v)
    return B


def write_matrix_json(path: str | Path, B: NDArray, **extra) -> None:
    payload = matrix_to_triplets(B)
    payload.update(extra)
    Path(path).write_text(json.dumps(payload, indent=1))


def read_matrix_json(path: str | Path) -> NDArray:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"{path}: invalid JSON ({exc})") from exc
    return triplets_to_matrix(obj)
