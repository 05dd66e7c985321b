"""Extremum detection on sampled curves."""

import numpy as np


def local_extrema(y, prominence: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    """Indices of interior local maxima and minima of ``y``.

    Plateaus count once, at their first sample.  With ``prominence > 0`` a
    maximum must stand at least that far above the lowest value on each side
    of it (minima likewise below the highest value).
    """
    y = np.asarray(y, dtype=float)
    keep = np.concatenate(([True], np.diff(y) != 0))
    idx = np.flatnonzero(keep)
    z = y[idx]
    d = np.sign(np.diff(z))
    maxima = idx[1:-1][(d[:-1] > 0) & (d[1:] < 0)]
    minima = idx[1:-1][(d[:-1] < 0) & (d[1:] > 0)]
    if prominence > 0:
        maxima = np.array([i for i in maxima if _prominent(y, i, prominence, +1)], dtype=int)
        minima = np.array([i for i in minima if _prominent(y, i, prominence, -1)], dtype=int)
    return maxima, minima


def _prominent(y: np.ndarray, i: int, prom: float, sign: int) -> bool:
    left = y[: i + 1]
    right = y[i:]
    if sign > 0:
        return y[i] - left.min() >= prom and y[i] - right.min() >= prom
    return left.max() - y[i] >= prom and right.max() - y[i] >= prom


def refine_peak(x, y, i: int) -> float:
    """Parabolic interpolation of an extremum location around sample ``i``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if i <= 0 or i >= y.size - 1:
        return float(x[i])
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    denom = y0 - 2.0 * y1 + y2
    if denom == 0:
        return float(x[i])
    shift = 0.5 * (y0 - y2) / denom
    return float(x[i] + shift * (x[i + 1] - x[i - 1]) / 2.0)
