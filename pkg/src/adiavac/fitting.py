"""Shared power-law fitting helpers (least squares in log-log space)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFit

# Values below this are treated as numerically dead rather than data.
UNDERFLOW_FLOOR = 1e-280


@dataclass(frozen=True)
class PowerLawFit:
    """Result of fitting log y = slope * log x + intercept."""

    slope: float
    intercept: float
    stderr: float
    npoints: int

    def prefactor(self) -> float:
        return math.exp(self.intercept)


def fit_loglog(x, y, floor: float = UNDERFLOW_FLOOR) -> PowerLawFit:
    """Least-squares slope of log y against log x.

    Raises DegenerateFit when any y is at or below the underflow floor
    (a vanishing difference, e.g. on a static background) or when the
    abscissae do not spread.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-d arrays of equal length")
    if x.size < 2:
        raise DegenerateFit(f"need at least 2 points, got {x.size}")
    if np.any(x <= 0.0):
        raise DegenerateFit("non-positive abscissa in log-log fit")
    if np.any(np.abs(y) <= floor):
        raise DegenerateFit("ordinate underflow in log-log fit")
    lx = np.log(np.abs(x))
    ly = np.log(np.abs(y))
    sxx = float(np.sum((lx - lx.mean()) ** 2))
    if sxx <= 0.0:
        raise DegenerateFit("abscissae do not spread")
    slope = float(np.sum((lx - lx.mean()) * (ly - ly.mean())) / sxx)
    intercept = float(ly.mean() - slope * lx.mean())
    resid = ly - (slope * lx + intercept)
    if x.size > 2:
        stderr = math.sqrt(float(np.sum(resid**2)) / (x.size - 2) / sxx)
    else:
        stderr = 0.0
    return PowerLawFit(slope=slope, intercept=intercept, stderr=stderr, npoints=int(x.size))
