"""Plain-text matrix files: one row per line, space-separated values."""
from __future__ import annotations

import numpy as np

from .errors import FormatError


def format_matrix(values, integer: bool = False) -> str:
    arr = np.asarray(values)
    if arr.ndim != 2:
        raise FormatError(f"expected a 2-D matrix, got shape {arr.shape}")
    if integer:
        rows = (" ".join(str(int(v)) for v in row) for row in arr)
    else:
        rows = (" ".join(f"{float(v):.6f}" for v in row) for row in arr)
    return "".join(r + "\n" for r in rows)


def write_matrix(path, values, integer: bool = False) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(format_matrix(values, integer))


def read_matrix(path) -> np.ndarray:
    with open(path, encoding="ascii") as fh:
        rows = [line.split() for line in fh if line.strip()]
    if not rows or len({len(r) for r in rows}) != 1:
        raise FormatError(f"{path}: rows are missing or ragged")
    try:
        return np.array(rows, dtype=np.float64)
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from None
