"""First and second moments of nonnegative durations and their sums."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_JENSEN_SLACK = 1e-9  # relative tolerance when checking second_moment >= mean^2


@dataclass(frozen=True)
class MomentPair:
    """(mean, second moment) of a nonnegative duration."""

    mean: float
    second_moment: float

    def __post_init__(self) -> None:
        if self.mean < 0:
            raise ValueError(f"mean must be >= 0, got {self.mean}")
        floor = self.mean**2
        if self.second_moment < floor * (1 - _JENSEN_SLACK) - _JENSEN_SLACK:
            raise ValueError(
                f"impossible moment pair: E[X^2]={self.second_moment} < "
                f"mean^2={floor}"
            )

    @property
    def variance(self) -> float:
        return max(self.second_moment - self.mean**2, 0.0)

    @staticmethod
    def exponential(rate: float) -> "MomentPair":
        if rate <= 0:
            raise ValueError(f"rate must be positive, got {rate}")
        return MomentPair(1.0 / rate, 2.0 / rate**2)

    @staticmethod
    def deterministic(value: float) -> "MomentPair":
        return MomentPair(value, value**2)

    @staticmethod
    def from_samples(x: np.ndarray) -> "MomentPair":
        x = np.asarray(x, dtype=np.float64)
        return MomentPair(float(x.mean()), float(np.mean(x**2)))


def iid_sum(pair: MomentPair, count: float) -> MomentPair:
    """Moments of a sum of `count` i.i.d. copies; count may be real-valued."""
    if count < 0:
        raise ValueError(f"count must be >= 0, got {count}")
    mean = count * pair.mean
    return MomentPair(mean, mean**2 + count * pair.variance)


def independent_total(pairs) -> MomentPair:
    """Moments of a sum of independent (not identically distributed) terms.

    E[(sum T_i)^2] = sum E[T_i^2] + 2 sum_{i<j} E[T_i]E[T_j], which reduces to
    (sum means)^2 + sum variances under independence.
    """
    pairs = list(pairs)
    mean = sum(p.mean for p in pairs)
    var = sum(p.variance for p in pairs)
    return MomentPair(mean, mean**2 + var)
