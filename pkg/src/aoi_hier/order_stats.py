"""Moments and samplers for order statistics of i.i.d. exponential variables.

For X_1, ..., X_n i.i.d. Exp(rate), the k-th smallest value X_{k:n} has

    E[X_{k:n}]   = (H_n - H_{n-k}) / rate
    Var[X_{k:n}] = (G_n - G_{n-k}) / rate**2

with H_m = sum_{j<=m} 1/j and G_m = sum_{j<=m} 1/j**2.  These identities,
together with the closure "min of m exponentials is Exp(m*rate)", are the
workhorses of every analytic expression in this package.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np
from scipy import special

EULER_GAMMA = 0.57721566490153286061
PI2_OVER_6 = math.pi**2 / 6

# Exact summation below this, asymptotic expansion above.  The expansion error
# at the threshold is < 1/(252 m^6) ~ 4e-45 for H and O(m^-7) for G, far below
# double-precision resolution, so the two branches join seamlessly.
EXACT_SUM_LIMIT = 10_000_000

# Partial sums up to this index are memoized; larger (but still sub-threshold)
# arguments are summed on demand without caching.
_CACHE_LIMIT = 1 << 21


class HarmonicCache:
    """Memoized partial sums H_m and G_m, safe for concurrent callers."""

    def __init__(self) -> None:
        self._h = np.zeros(1)
        self._g = np.zeros(1)
        self._lock = threading.Lock()

    def _grow(self, m: int) -> None:
        with self._lock:
            have = len(self._h) - 1
            if m <= have:
                return
            target = min(_CACHE_LIMIT, max(m, 2 * have, 1024))
            j = np.arange(have + 1, target + 1, dtype=np.float64)
            self._h = np.concatenate([self._h, self._h[-1] + np.cumsum(1.0 / j)])
            self._g = np.concatenate([self._g, self._g[-1] + np.cumsum(1.0 / j**2)])

    @staticmethod
    def _sum_range(lo: int, hi: int, power: int) -> float:
        # sum of 1/j**power for j in (lo, hi], chunked to bound memory
        total = 0.0
        step = 1 << 20
        for start in range(lo + 1, hi + 1, step):
            j = np.arange(start, min(start + step, hi + 1), dtype=np.float64)
            total += float(np.sum(1.0 / j**power))
        return total

    def harmonic(self, m: int) -> float:
        """H_m by exact summation, or asymptotic expansion for huge m."""
        if m < 0:
            raise ValueError(f"harmonic index must be >= 0, got {m}")
        if m <= _CACHE_LIMIT:
            if m >= len(self._h):
                self._grow(m)
            return float(self._h[m])
        if m <= EXACT_SUM_LIMIT:
            self._grow(_CACHE_LIMIT)
            return float(self._h[-1]) + self._sum_range(_CACHE_LIMIT, m, 1)
        x = float(m)
        return (
            math.log(x)
            + EULER_GAMMA
            + 1.0 / (2 * x)
            - 1.0 / (12 * x**2)
            + 1.0 / (120 * x**4)
        )

    def gsum(self, m: int) -> float:
        """G_m; converges to pi^2/6 from below."""
        if m < 0:
            raise ValueError(f"gsum index must be >= 0, got {m}")
        if m <= _CACHE_LIMIT:
            if m >= len(self._g):
                self._grow(m)
            return float(self._g[m])
        if m <= EXACT_SUM_LIMIT:
            self._grow(_CACHE_LIMIT)
            return float(self._g[-1]) + self._sum_range(_CACHE_LIMIT, m, 2)
        # tail sum_{j>m} 1/j^2 = trigamma(m+1) ~ 1/m - 1/(2m^2) + 1/(6m^3) - ...
        x = float(m)
        tail = 1.0 / x - 1.0 / (2 * x**2) + 1.0 / (6 * x**3) - 1.0 / (30 * x**5)
        return PI2_OVER_6 - tail


_CACHE = HarmonicCache()


def harmonic(m: int) -> float:
    return _CACHE.harmonic(int(m))


def gsum(m: int) -> float:
    return _CACHE.gsum(int(m))


def harmonic_value(x: float) -> float:
    """H_x extended to real x >= 0 via digamma; exact sums at integers."""
    if x < 0:
        raise ValueError(f"harmonic argument must be >= 0, got {x}")
    if float(x).is_integer() and x <= EXACT_SUM_LIMIT:
        return harmonic(int(x))
    return float(special.digamma(x + 1.0)) + EULER_GAMMA


def gsum_value(x: float) -> float:
    """G_x extended to real x >= 0 via trigamma; exact sums at integers."""
    if x < 0:
        raise ValueError(f"gsum argument must be >= 0, got {x}")
    if float(x).is_integer() and x <= EXACT_SUM_LIMIT:
        return gsum(int(x))
    return PI2_OVER_6 - float(special.polygamma(1, x + 1.0))


@dataclass(frozen=True)
class OrderStatSpec:
    """The k-th order statistic of n i.i.d. Exp(rate) variables."""

    k: int
    n: int
    rate: float

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"sample count must be >= 1, got n={self.n}")
        if not 1 <= self.k <= self.n:
            raise ValueError(f"need 1 <= k <= n, got k={self.k}, n={self.n}")
        if not self.rate > 0:
            raise ValueError(f"rate must be positive, got {self.rate}")


def expected_order_stat(spec: OrderStatSpec) -> float:
    return (harmonic(spec.n) - harmonic(spec.n - spec.k)) / spec.rate


def variance_order_stat(spec: OrderStatSpec) -> float:
    return (gsum(spec.n) - gsum(spec.n - spec.k)) / spec.rate**2


def second_moment_order_stat(spec: OrderStatSpec) -> float:
    dh = harmonic(spec.n) - harmonic(spec.n - spec.k)
    dg = gsum(spec.n) - gsum(spec.n - spec.k)
    return (dh**2 + dg) / spec.rate**2


def sample_order_stat(
    spec: OrderStatSpec, rng: np.random.Generator, size: int | None = None
):
    """Draw X_{k:n} via the sum-of-spacings representation.

    Spacing i between consecutive order statistics is Exp(rate*(n-i+1)), so
    X_{k:n} = sum_{i=1..k} E_i / (rate*(n-i+1)) with E_i i.i.d. Exp(1).  This
    avoids materializing and sorting all n draws.
    """
    shape = (spec.k,) if size is None else (size, spec.k)
    e = rng.standard_exponential(shape)
    denom = spec.rate * np.arange(spec.n, spec.n - spec.k, -1, dtype=np.float64)
    out = (e / denom).sum(axis=-1)
    return float(out) if size is None else out


def sample_all_order_stats(
    n: int, rate: float, size: int, rng: np.random.Generator
) -> np.ndarray:
    """(size, n) array whose row j holds the sorted draws X_{1:n} .. X_{n:n}.

    Sorting route; distributionally equivalent to the spacings sampler and
    convenient when all k are wanted at once.
    """
    x = rng.standard_exponential((size, n)) / rate
    x.sort(axis=1)
    return x
