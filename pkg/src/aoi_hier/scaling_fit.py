"""Least-squares recovery of the polynomial growth exponent from age data.

The predicted growth is age ~ C * n^alpha * log(n); dividing the log factor
out first isolates alpha as the slope of log(age / log n) against log(n).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SlopeFit:
    exponent: float
    intercept: float
    r_squared: float
    points: int


def fit_scaling_exponent(n_values, ages) -> SlopeFit:
    """OLS fit of log(age / log n) on log n over >= 4 sweep points."""
    n_values = np.asarray(n_values, dtype=np.float64)
    ages = np.asarray(ages, dtype=np.float64)
    if len(n_values) < 4:
        raise ValueError("exponent fitting needs at least 4 points")
    if len(n_values) != len(ages):
        raise ValueError("n_values and ages must have equal length")
    if np.any(n_values <= 1) or np.any(ages <= 0):
        raise ValueError("need n > 1 and positive ages")
    x = np.log(n_values)
    y = np.log(ages / np.log(n_values))
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return SlopeFit(float(slope), float(intercept), r2, len(n_values))
