"""Renewal-reward average age and its trace-based (sawtooth) counterpart.

A session of duration Y_j serves every source-destination pair once.  With
i.i.d. session durations, the long-run time-averaged age of a pair is

    age = E[D] + E[Y^2] / (2 E[Y])

where D is the generation-to-delivery delay of an update.  Under the
session-end convention (every delivery counted at the end of its session,
D_j = Y_j) this becomes E[Y] + E[Y^2] / (2 E[Y]).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .moments import MomentPair


@dataclass(frozen=True)
class SessionTrace:
    """Ordered session durations, optionally with per-session delivery delays."""

    durations: np.ndarray
    delivery_offsets: np.ndarray | None = None

    def __post_init__(self) -> None:
        d = np.asarray(self.durations, dtype=np.float64)
        object.__setattr__(self, "durations", d)
        if np.any(d <= 0):
            raise ValueError("all session durations must be positive")
        if self.delivery_offsets is not None:
            off = np.asarray(self.delivery_offsets, dtype=np.float64)
            object.__setattr__(self, "delivery_offsets", off)
            if off.shape != d.shape:
                raise ValueError("delivery_offsets must match durations in length")
            if np.any(off <= 0) or np.any(off > d * (1 + 1e-12)):
                raise ValueError("delivery offsets must satisfy 0 < D_j <= Y_j")

    def __len__(self) -> int:
        return len(self.durations)


@dataclass(frozen=True)
class AgeEstimate:
    mean_age: float
    half_width: float
    sessions_used: int

    def __post_init__(self) -> None:
        if self.mean_age <= 0:
            raise ValueError("mean age must be positive")
        if self.half_width < 0:
            raise ValueError("confidence half-width must be >= 0")


def average_age_formula(moments_y: MomentPair, mean_d: float) -> float:
    """age = E[D] + E[Y^2] / (2 E[Y]) for i.i.d. sessions."""
    if moments_y.mean <= 0:
        raise ValueError("mean session duration must be positive")
    if mean_d < 0:
        raise ValueError("mean delivery delay must be >= 0")
    return mean_d + moments_y.second_moment / (2.0 * moments_y.mean)


def average_age_session_end(moments_y: MomentPair) -> float:
    """Session-end convention: deliveries counted at session end, D = Y."""
    return average_age_formula(moments_y, moments_y.mean)


def time_average_from_trace(trace: SessionTrace, batches: int = 100) -> AgeEstimate:
    """Exact sawtooth time integral of the age over a finite trace.

    The update generated at the start of session j+1 is delivered D_{j+1}
    after generation (D = Y under the session-end convention), resetting the
    age to D_{j+1}.  Between resets age grows at unit rate, so cycle j spans
    width w_j = Y_j + D_{j+1} - D_j starting from age D_j, contributing area
    D_j * w_j + w_j^2 / 2.  Integration starts at the first delivery, i.e. at
    the end of the first session (steady-state convention).

    The confidence half-width is a 95% batch-means interval over `batches`
    contiguous groups of cycles (fewer when the trace is short).
    """
    y = trace.durations
    if len(y) < 2:
        raise ValueError("trace must contain at least 2 sessions")
    d = trace.delivery_offsets if trace.delivery_offsets is not None else y
    widths = y[:-1] + d[1:] - d[:-1]
    if np.any(widths <= 0):
        raise ValueError("delivery offsets produce a non-monotone delivery order")
    areas = d[:-1] * widths + widths**2 / 2.0
    mean_age = float(areas.sum() / widths.sum())

    n_cycles = len(widths)
    k = min(batches, n_cycles)
    half = 0.0
    if k >= 2:
        edges = np.linspace(0, n_cycles, k + 1).astype(int)
        batch_area = np.add.reduceat(areas, edges[:-1])
        batch_width = np.add.reduceat(widths, edges[:-1])
        ratios = batch_area / batch_width
        se = float(ratios.std(ddof=1)) / np.sqrt(k)
        half = float(stats.t.ppf(0.975, k - 1)) * se
    return AgeEstimate(mean_age=mean_age, half_width=half, sessions_used=len(y))
