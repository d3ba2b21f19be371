"""Closed-form session moments and scaling exponents for the three-phase
hierarchical update scheme.

The scheme partitions n nodes into n^(1-b) cells of n^b nodes; with one level
of hierarchy each cell splits into n^(b-a) subcells of n^a nodes.  Link delays
are i.i.d. exponential: rate lambda_0 between cells, lambda_1 between subcells
of one cell, lambda_2 inside a subcell.  Every session-duration term is a sum
of i.i.d. copies of "the maximum over m_max draws of (the minimum over m_min
exponentials)", so all moments follow from the order-statistic identities in
:mod:`aoi_hier.order_stats`.

Two evaluation modes are exposed:

* ``exact``  - harmonic sums H_m and G_m evaluated exactly, counts either
  real-valued powers of n or integers rounded for the simulator;
* ``approx`` - the large-n regime with H_m -> log(m) and G_m -> pi^2/6,
  reproducing the closed-form moment block term by term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .age_renewal import average_age_formula, average_age_session_end
from .moments import MomentPair, iid_sum, independent_total
from .order_stats import PI2_OVER_6, gsum_value, harmonic_value

PHASE1_TERMS_H1 = ("vbar1", "vbar2", "vbar3")
PHASE3_TERMS_H1 = ("vbbar1", "vbbar2", "vbbar3")


@dataclass(frozen=True)
class HierarchyConfig:
    """Network size, hierarchy depth, cell/subcell exponents, per-level rates.

    ``rates[0]`` governs inter-cell links, ``rates[d]`` links between depth-d
    units within a depth-(d-1) unit, and ``rates[h+1]`` links inside the
    innermost subcells.  For h=0 that means (lambda_0 inter-cell, lambda_1
    intra-cell); for h=1 it is (lambda_0, lambda_1, lambda_2) as above.
    """

    n: float
    h: int = 1
    b: float = 2.0 / 7.0
    a: float | None = 1.0 / 7.0
    rates: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.n <= 1:
            raise ValueError(f"network size must exceed 1, got n={self.n}")
        if self.h < 0:
            raise ValueError(f"hierarchy depth must be >= 0, got {self.h}")
        if not 0 < self.b <= 1:
            raise ValueError(f"cell exponent b must lie in (0, 1], got {self.b}")
        if self.h >= 1:
            if self.a is None:
                raise ValueError("subcell exponent a is required when h >= 1")
            if not 0 < self.a < self.b:
                raise ValueError(
                    f"need 0 < a < b, got a={self.a}, b={self.b}"
                )
        rates = tuple(self.rates) if self.rates else (1.0,) * (self.h + 2)
        object.__setattr__(self, "rates", rates)
        if len(rates) != self.h + 2:
            raise ValueError(
                f"h={self.h} needs {self.h + 2} rates, got {len(rates)}"
            )
        if any(r <= 0 for r in rates):
            raise ValueError(f"all rates must be positive, got {rates}")

    @staticmethod
    def optimal(n: float, h: int, rates: tuple[float, ...] = ()) -> "HierarchyConfig":
        """Config at the scaling-optimal exponents for depth h."""
        sched = general_h_exponent_schedule(h)
        b = float(sched[0])
        a = float(sched[1]) if h >= 1 else None
        return HierarchyConfig(n=n, h=h, b=b, a=a, rates=rates)


@dataclass(frozen=True)
class TermSpec:
    """Sum of `count` i.i.d. draws of max over `max_count` of Exp(min_count*rate)."""

    name: str
    phase: int
    count: float
    max_count: float
    min_count: float
    rate: float

    def moments(self, mode: str = "exact") -> MomentPair:
        scale = self.min_count * self.rate
        if mode == "approx":
            h = math.log(self.max_count)
            g = PI2_OVER_6
        elif mode == "exact":
            h = harmonic_value(self.max_count)
            g = gsum_value(self.max_count)
        else:
            raise ValueError(f"unknown mode {mode!r}")
        single = MomentPair(h / scale, (h / scale) ** 2 + g / scale**2)
        return iid_sum(single, self.count)


def rounded_counts(cfg: HierarchyConfig) -> dict[str, int]:
    """Integer counts for a concrete network, reconciled multiplicatively.

    nodes_per_subcell = round(n^a) and subcells_per_cell = round(n^(b-a)) are
    rounded first; nodes_per_cell is their product (so the grid stays
    consistent) and the cell count is rounded last.  Every count is clamped
    to >= 1.  h=0 degenerates to a single subcell spanning the whole cell.
    """
    if cfg.h > 1:
        raise ValueError("rounded counts are defined for h in {0, 1}")
    if cfg.h == 0:
        m = max(1, round(cfg.n**cfg.b))
        s, c = m, 1
    else:
        s = max(1, round(cfg.n**cfg.a))
        c = max(1, round(cfg.n ** (cfg.b - cfg.a)))
        m = s * c
    cells = max(1, round(cfg.n / m))
    return {
        "nodes_per_subcell": s,
        "subcells_per_cell": c,
        "nodes_per_cell": m,
        "cells": cells,
        "total_nodes": cells * m,
        "total_subcells": cells * c,
    }


def session_terms_from_counts(counts: dict[str, float], rates, h: int) -> list[TermSpec]:
    """Bounded-session terms from explicit (real or integer) grid counts.

    ``counts`` uses the keys of :func:`rounded_counts`; values may be
    real-valued powers of n in analytic mode.
    """
    s = counts["nodes_per_subcell"]
    c = counts["subcells_per_cell"]
    m = counts["nodes_per_cell"]
    cells = counts["cells"]
    total = counts["total_nodes"]
    subcells = counts["total_subcells"]
    l0 = rates[0]
    if h == 0:
        l1 = rates[1]
        return [
            TermSpec("vbar1", 1, m, total, 1, l1),
            TermSpec("y2", 2, cells, m, m**2, l0),
            TermSpec("vbbar1", 3, m, total, 1, l1),
        ]
    if h != 1:
        raise ValueError("closed-form session terms are defined for h in {0, 1}")
    l1, l2 = rates[1], rates[2]
    return [
        # Phase I bound: local TDMA, subcell MIMO, broadcast relay
        TermSpec("vbar1", 1, s, total, 1, l2),
        TermSpec("vbar2", 1, c, subcells, s**2, l1),
        TermSpec("vbar3", 1, c, total, 1, l2),
        # Phase II: successive inter-cell MIMO-like rounds
        TermSpec("y2", 2, cells, m, m**2, l0),
        # Phase III bound: local TDMA, subcell MIMO, single-recipient relay
        TermSpec("vbbar1", 3, s, total, 1, l2),
        TermSpec("vbbar2", 3, c, cells * s, s**2, l1),
        TermSpec("vbbar3", 3, s, subcells, 1, l2),
    ]


def session_terms(cfg: HierarchyConfig, rounded: bool = False) -> list[TermSpec]:
    """The independent duration terms of the (phase-bounded) session at h<=1.

    Phase I and III are replaced by their tractable upper bounds in which
    per-group maxima are widened to network-wide maxima; phase II is the exact
    MIMO-like round.  Total session time is the sum of the returned terms.
    """
    if cfg.h > 1:
        raise ValueError("closed-form session terms are defined for h in {0, 1}")
    if rounded:
        counts: dict[str, float] = dict(rounded_counts(cfg))
    else:
        n = float(cfg.n)
        m = n**cfg.b
        s = n**cfg.a if cfg.h == 1 else m
        counts = {
            "nodes_per_subcell": s,
            "subcells_per_cell": m / s,
            "nodes_per_cell": m,
            "cells": n ** (1 - cfg.b),
            "total_nodes": n,
            "total_subcells": n / s,
        }
    return session_terms_from_counts(counts, cfg.rates, cfg.h)


@dataclass(frozen=True)
class PhaseMoments:
    """Per-term moment pairs plus phase and session aggregates."""

    terms: dict[str, MomentPair]
    phases: dict[str, tuple[str, ...]] = field(
        default_factory=lambda: {
            "phase1": PHASE1_TERMS_H1,
            "phase2": ("y2",),
            "phase3": PHASE3_TERMS_H1,
        }
    )

    def phase(self, which: str) -> MomentPair:
        names = [t for t in self.phases[which] if t in self.terms]
        return independent_total(self.terms[t] for t in names)

    @property
    def phase1(self) -> MomentPair:
        return self.phase("phase1")

    @property
    def phase2(self) -> MomentPair:
        return self.phase("phase2")

    @property
    def phase3(self) -> MomentPair:
        return self.phase("phase3")

    @property
    def session(self) -> MomentPair:
        return independent_total(self.terms.values())


def session_moments(
    cfg: HierarchyConfig, mode: str = "exact", rounded: bool = False
) -> PhaseMoments:
    """Moment pairs of every session term under the requested evaluation mode."""
    return PhaseMoments(
        terms={t.name: t.moments(mode) for t in session_terms(cfg, rounded)}
    )


def phase_moments_approx(cfg: HierarchyConfig) -> PhaseMoments:
    """Large-n closed forms: H_m -> log m, G_m -> pi^2/6, real-valued counts.

    For h=1 this reproduces, term by term, e.g.

        E[Y_II]   = b n^(1-3b) log(n) / lambda_0
        E[Y_II^2] = n^(1-5b) pi^2 / (6 lambda_0^2)
                    + b^2 n^(2(1-3b)) log(n)^2 / lambda_0^2

    and the grouped phase means equal the sums of the per-term means.
    """
    return session_moments(cfg, mode="approx", rounded=False)


def exact_mimo_phase_mean(cfg: HierarchyConfig, rounded: bool = True) -> float:
    """Sharp mean of the inter-cell MIMO phase.

    Each cell's round is the max over m destination cells of an Exp(m^2 *
    lambda_0) reception time (min over the m^2 cross links), repeated over all
    cells: mean = cells * H_m / (lambda_0 * m^2).
    """
    if rounded:
        rc = rounded_counts(cfg)
        m, cells = rc["nodes_per_cell"], rc["cells"]
    else:
        m, cells = cfg.n**cfg.b, cfg.n ** (1 - cfg.b)
    if m < 1 or cells < 1:
        raise ValueError("degenerate cell plan")
    return cells * harmonic_value(m) / (cfg.rates[0] * m**2)


def average_age_analytic(
    cfg: HierarchyConfig,
    mode: str = "exact",
    rounded: bool = False,
    mean_delay: float | None = None,
) -> float:
    """Average age of one pair from the closed-form session moments.

    Cross moments of the squared session use independence of the duration
    terms (they are built from disjoint link-delay variables).  By default the
    session-end delivery convention (D = Y) is applied; pass ``mean_delay`` to
    use a measured mean generation-to-delivery delay instead.
    """
    total = session_moments(cfg, mode=mode, rounded=rounded).session
    if mean_delay is None:
        return average_age_session_end(total)
    return average_age_formula(total, mean_delay)


def alpha(h: int) -> Fraction:
    """Scaling exponent 1 / (3 * 2^h + 1) of the age growth in n."""
    if h < 0:
        raise ValueError(f"hierarchy depth must be >= 0, got {h}")
    return Fraction(1, 3 * 2**h + 1)


def general_h_exponent_schedule(h: int) -> list[Fraction]:
    """Per-level cell-size exponents [b, b/2, ..., b/2^h].

    The top-level exponent solves b / 2^h = 1 - 3b (halving at every level,
    innermost matching the inter-cell phase), so b = 2^h / (3 * 2^h + 1) and
    the deepest exponent equals alpha(h).
    """
    if h < 0:
        raise ValueError(f"hierarchy depth must be >= 0, got {h}")
    b = Fraction(2**h, 3 * 2**h + 1)
    return [b / 2**level for level in range(h + 1)]


def dominant_growth_exponent(h: int, b: float, a: float | None = None) -> float:
    """Polynomial growth order (log factors dropped) of the average age."""
    if h == 0:
        return max(b, 1 - 3 * b)
    if h == 1:
        if a is None:
            raise ValueError("h=1 requires the subcell exponent a")
        return max(a, b - a, b - 3 * a, 1 - 3 * b)
    raise ValueError("direct exponent evaluation is defined for h in {0, 1}")


@dataclass(frozen=True)
class ExponentChoice:
    a: float | None
    b: float
    exponent: float


def optimize_exponents(h: int, rates: tuple[float, ...] = ()) -> ExponentChoice:
    """Minimize the dominant growth exponent over the admissible (a, b).

    For h in {0, 1} a coarse-to-fine grid search over the exact exponent
    objective is used (the objective does not depend on the rates); for
    deeper hierarchies the exponent-balance schedule gives the optimum
    directly.
    """
    del rates  # the growth exponent is rate-independent
    if h < 0:
        raise ValueError(f"hierarchy depth must be >= 0, got {h}")
    if h == 0:
        lo, hi = 1e-4, 1.0
        for _ in range(40):
            grid = [lo + (hi - lo) * i / 128 for i in range(129)]
            best = min(grid, key=lambda b: dominant_growth_exponent(0, b))
            span = (hi - lo) / 128
            lo, hi = max(1e-6, best - span), min(1.0, best + span)
            if span < 1e-12:
                break
        return ExponentChoice(None, best, dominant_growth_exponent(0, best))
    if h == 1:
        lo_a, hi_a, lo_b, hi_b = 1e-4, 1.0, 1e-4, 1.0
        best = (1e-4, 2e-4)
        for _ in range(30):
            grid_a = [lo_a + (hi_a - lo_a) * i / 64 for i in range(65)]
            grid_b = [lo_b + (hi_b - lo_b) * i / 64 for i in range(65)]
            cand = [
                (a, b) for b in grid_b for a in grid_a if 0 < a < b <= 1.0
            ]
            best = min(cand, key=lambda ab: dominant_growth_exponent(1, ab[1], ab[0]))
            span_a = (hi_a - lo_a) / 64
            span_b = (hi_b - lo_b) / 64
            lo_a, hi_a = max(1e-6, best[0] - span_a), min(1.0, best[0] + span_a)
            lo_b, hi_b = max(1e-6, best[1] - span_b), min(1.0, best[1] + span_b)
            if max(span_a, span_b) < 1e-10:
                break
        a, b = best
        return ExponentChoice(a, b, dominant_growth_exponent(1, b, a))
    sched = general_h_exponent_schedule(h)
    return ExponentChoice(float(sched[1]), float(sched[0]), float(alpha(h)))
