"""Log-log regression for critical exponents."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import InsufficientPoints


@dataclass(frozen=True)
class PowerLawFit:
    exponent: float
    stderr: float
    prefactor: float
    window: tuple[float, float]
    n_points: int


def fit_power_law(x, y, min_points: int = 3) -> PowerLawFit:
    """Least-squares fit of ``log y = log c + p log x``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) < min_points:
        raise InsufficientPoints(f"need at least {min_points} points, got {len(x)}")
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("power-law fits need strictly positive data")
    res = stats.linregress(np.log(x), np.log(y))
    return PowerLawFit(float(res.slope), float(res.stderr), float(np.exp(res.intercept)),
                       (float(x.min()), float(x.max())), len(x))
