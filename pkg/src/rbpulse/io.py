"""CSV emission for traces and sweep datasets."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import numpy as np


def write_csv(path, header: Sequence[str], *columns) -> Path:
    """Write equal-length columns as CSV with 12 significant digits."""
    path = Path(path)
    data = np.column_stack([np.asarray(c, dtype=float) for c in columns]) if columns else np.empty((0, len(header)))
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in data:
            fh.write(",".join(f"{x:.12g}" for x in row) + "\n")
    return path


def read_csv(path) -> tuple[list[str], np.ndarray]:
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return header, data
