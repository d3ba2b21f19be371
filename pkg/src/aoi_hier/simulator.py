"""Monte Carlo simulation of session durations for the three-phase scheme.

Two variants are sampled at h in {0, 1}:

* ``exact``   - the scheme as operated: per-subcell TDMA sums, maxima over the
  groups that actually run in parallel;
* ``bounded`` - the tractable upper bound in which every group maximum is
  widened to a network-wide maximum, matching the closed-form moment
  expressions in :mod:`aoi_hier.hierarchy` term for term.

Maxima and minima over large index sets are never materialized: the minimum
of m exponentials is Exp(m * rate) and the maximum of m i.i.d. Exp(rate) draws
is sampled through its inverse CDF, so each order-statistic draw costs one
uniform regardless of m.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .age_renewal import AgeEstimate, SessionTrace, time_average_from_trace
from .hierarchy import HierarchyConfig, rounded_counts, session_terms_from_counts
from .moments import MomentPair
from .order_stats import harmonic

# Trials are sampled in fixed-size chunks, each owning an rng stream derived
# from (seed, chunk_index); results are therefore independent of how chunks
# are dispatched, and reproducible bit for bit.
CHUNK = 512


@dataclass(frozen=True)
class CountPlan:
    """Integer grid counts used by the simulator."""

    cells: int
    nodes_per_cell: int
    subcells_per_cell: int
    nodes_per_subcell: int

    def __post_init__(self) -> None:
        if min(
            self.cells,
            self.nodes_per_cell,
            self.subcells_per_cell,
            self.nodes_per_subcell,
        ) < 1:
            raise ValueError("all plan counts must be >= 1")
        if self.nodes_per_subcell * self.subcells_per_cell != self.nodes_per_cell:
            raise ValueError("subcell grid does not tile the cell")

    @property
    def total_nodes(self) -> int:
        return self.cells * self.nodes_per_cell

    @property
    def total_subcells(self) -> int:
        return self.cells * self.subcells_per_cell

    @staticmethod
    def from_config(cfg: HierarchyConfig) -> "CountPlan":
        rc = rounded_counts(cfg)
        return CountPlan(
            cells=rc["cells"],
            nodes_per_cell=rc["nodes_per_cell"],
            subcells_per_cell=rc["subcells_per_cell"],
            nodes_per_subcell=rc["nodes_per_subcell"],
        )


@dataclass(frozen=True)
class SessionSample:
    """One realization of the per-phase and total session durations."""

    y_phase1: float
    y_phase2: float
    y_phase3: float
    variant: str

    @property
    def y_total(self) -> float:
        return self.y_phase1 + self.y_phase2 + self.y_phase3


def _max_exp(rng, shape, m: int, rate: float, mean_mode: bool) -> np.ndarray:
    """Max over m i.i.d. Exp(rate); one uniform per draw via the inverse CDF."""
    if m <= 0:
        return np.zeros(shape)
    if mean_mode:
        return np.full(shape, harmonic(m) / rate)
    # single-precision draws with double accumulation downstream: per-draw
    # relative error ~6e-8 is far below every Monte Carlo tolerance used, and
    # generation is several times faster
    if m == 1:
        return rng.standard_exponential(shape, dtype=np.float32) / np.float32(rate)
    u = rng.random(shape, dtype=np.float32)
    # guard log(0): exact zeros occur with probability 2^-24 per draw
    np.maximum(u, np.float32(1e-12), out=u)
    if m <= 64:
        # 1 - u**(1/m) keeps full relative accuracy at small m; np.log/np.exp
        # are the only vectorized transcendentals worth paying for here
        w = np.exp(np.log(u) / np.float32(m))
        np.subtract(np.float32(1.0), w, out=w)
        # clamp the tail where w rounded up to 1 (probability ~m * 1e-10)
        np.maximum(w, np.float32(1e-10), out=w)
        return -np.log(w) / np.float32(rate)
    # 1 - u**(1/m) evaluated stably for large m
    return -np.log(-np.expm1(np.log(u) / np.float32(m))) / np.float32(rate)


def _max_of_sums(
    rng,
    trials: int,
    groups: int,
    summands: int,
    m: int,
    min_count: int,
    rate: float,
    mean_mode: bool,
) -> np.ndarray:
    """max over `groups` parallel units of a sum of `summands` i.i.d. draws,
    each draw the max over m copies of Exp(min_count * rate)."""
    if groups <= 0 or summands <= 0 or m <= 0:
        return np.zeros(trials)
    x = _max_exp(rng, (trials, groups, summands), m, min_count * rate, mean_mode)
    return x.sum(axis=2, dtype=np.float64).max(axis=1)


def _sum_of_maxes(
    rng,
    trials: int,
    summands: int,
    m: int,
    min_count: int,
    rate: float,
    mean_mode: bool,
) -> np.ndarray:
    if summands <= 0 or m <= 0:
        return np.zeros(trials)
    x = _max_exp(rng, (trials, summands), m, min_count * rate, mean_mode)
    return x.sum(axis=1, dtype=np.float64)


def _mimo_phase(plan: CountPlan, rate0: float, rng, trials, mean_mode) -> np.ndarray:
    """Successive inter-cell MIMO rounds: sum over cells of the max over
    nodes_per_cell destination cells of an Exp(nodes_per_cell^2 * rate0)."""
    m = plan.nodes_per_cell
    return _sum_of_maxes(rng, trials, plan.cells, m, m * m, rate0, mean_mode)


def _sample_bounded(plan, rates, rng, trials, h, mean_mode):
    cfg_terms = _plan_terms(plan, rates, h)
    phases = {1: np.zeros(trials), 2: np.zeros(trials), 3: np.zeros(trials)}
    for t in cfg_terms:
        phases[t.phase] += _sum_of_maxes(
            rng, trials, int(t.count), int(t.max_count), int(t.min_count), t.rate,
            mean_mode,
        )
    return phases[1], phases[2], phases[3]


def _plan_terms(plan: CountPlan, rates, h: int):
    counts = {
        "nodes_per_subcell": plan.nodes_per_subcell,
        "subcells_per_cell": plan.subcells_per_cell,
        "nodes_per_cell": plan.nodes_per_cell,
        "cells": plan.cells,
        "total_nodes": plan.total_nodes,
        "total_subcells": plan.total_subcells,
    }
    return session_terms_from_counts(counts, tuple(rates), h)


def _sample_exact_h0(plan, rates, rng, trials, mean_mode):
    l0, l1 = rates
    m, cells = plan.nodes_per_cell, plan.cells
    y1 = _max_of_sums(rng, trials, cells, m, m - 1, 1, l1, mean_mode)
    y2 = _mimo_phase(plan, l0, rng, trials, mean_mode)
    y3 = _max_of_sums(rng, trials, cells, m, 1, 1, l1, mean_mode)
    return y1, y2, y3


def _sample_exact_h1(plan, rates, rng, trials, mean_mode):
    l0, l1, l2 = rates
    s = plan.nodes_per_subcell
    c = plan.subcells_per_cell
    cells = plan.cells
    subcells = plan.total_subcells

    # Phase I: per-subcell TDMA, subcell-level MIMO inside each cell, then
    # broadcast relay of every received preliminary packet.
    y1 = _max_of_sums(rng, trials, subcells, s, s - 1, 1, l2, mean_mode)
    y1 += _max_of_sums(rng, trials, cells, c, c - 1, s * s, l1, mean_mode)
    y1 += _max_of_sums(rng, trials, subcells, c - 1, s - 1, 1, l2, mean_mode)

    y2 = _mimo_phase(plan, l0, rng, trials, mean_mode)

    # Phase III mirrors Phase I but ends with single-recipient relays.  With a
    # single subcell per cell the packets already sit in their destination
    # subcell after Phase II, so the regrouping and subcell MIMO steps vanish.
    y3 = np.zeros(trials)
    if c > 1:
        y3 += _max_of_sums(rng, trials, subcells, s, s - 1, 1, l2, mean_mode)
        y3 += _max_of_sums(rng, trials, cells, c, s, s * s, l1, mean_mode)
    y3 += _max_of_sums(rng, trials, subcells, s, 1, 1, l2, mean_mode)
    return y1, y2, y3


def _sample_chunk(plan, rates, rng, trials, h, variant, mean_mode):
    if variant == "bounded":
        return _sample_bounded(plan, rates, rng, trials, h, mean_mode)
    if variant != "exact":
        raise ValueError(f"unknown variant {variant!r}")
    if h == 0:
        return _sample_exact_h0(plan, rates, rng, trials, mean_mode)
    if h == 1:
        return _sample_exact_h1(plan, rates, rng, trials, mean_mode)
    raise ValueError("direct sampling supports h in {0, 1}; use recursive_phase1")


def simulate_session_bounded(
    plan: CountPlan, rates, rng: np.random.Generator
) -> SessionSample:
    """One session of the upper-bounded scheme (h inferred from the rate count)."""
    rates = tuple(rates)
    y1, y2, y3 = _sample_bounded(plan, rates, rng, 1, len(rates) - 2, False)
    return SessionSample(float(y1[0]), float(y2[0]), float(y3[0]), "bounded")


def simulate_session_exact(
    plan: CountPlan, rates, rng: np.random.Generator
) -> SessionSample:
    """One session of the scheme as operated (h inferred from the rate count)."""
    rates = tuple(rates)
    h = len(rates) - 2
    y1, y2, y3 = _sample_chunk(plan, rates, rng, 1, h, "exact", False)
    return SessionSample(float(y1[0]), float(y2[0]), float(y3[0]), "exact")


def simulate_sessions(
    cfg: HierarchyConfig,
    trials: int,
    seed: int,
    variant: str = "bounded",
    deterministic: bool = False,
) -> dict[str, np.ndarray]:
    """Arrays of per-phase durations for `trials` i.i.d. sessions.

    Fully reproducible from (cfg, trials, seed); `deterministic=True` replaces
    every random draw by its mean (testing hook).
    """
    if cfg.h > 1:
        raise ValueError("phase-resolved sampling supports h in {0, 1}")
    plan = CountPlan.from_config(cfg)
    out = {k: np.empty(trials) for k in ("y1", "y2", "y3")}
    for idx, start in enumerate(range(0, trials, CHUNK)):
        stop = min(start + CHUNK, trials)
        rng = np.random.default_rng(np.random.SeedSequence((int(seed), idx)))
        y1, y2, y3 = _sample_chunk(
            plan, cfg.rates, rng, stop - start, cfg.h, variant, deterministic
        )
        out["y1"][start:stop] = y1
        out["y2"][start:stop] = y2
        out["y3"][start:stop] = y3
    out["y"] = out["y1"] + out["y2"] + out["y3"]
    return out


@dataclass(frozen=True)
class ExperimentResult:
    age: AgeEstimate
    phase_moments: dict[str, MomentPair]
    variant: str
    trials: int
    seed: int


def run_experiment(
    cfg: HierarchyConfig,
    trials: int,
    seed: int,
    variant: str = "bounded",
    deterministic: bool = False,
) -> ExperimentResult:
    """Sample sessions, feed the trace to the sawtooth integrator, and report
    the empirical age plus per-phase moment estimates."""
    if trials < 100:
        raise ValueError(f"need at least 100 trials, got {trials}")
    samples = simulate_sessions(cfg, trials, seed, variant, deterministic)
    age = time_average_from_trace(SessionTrace(samples["y"]))
    moments = {
        label: MomentPair.from_samples(samples[key])
        for label, key in (
            ("phase1", "y1"),
            ("phase2", "y2"),
            ("phase3", "y3"),
            ("session", "y"),
        )
    }
    return ExperimentResult(
        age=age, phase_moments=moments, variant=variant, trials=trials, seed=seed
    )


@dataclass(frozen=True)
class LevelPlan:
    """Unit counts at one hierarchy depth: how many units exist network-wide
    and how many nodes each unit holds."""

    units: int
    nodes_per_unit: int


def plan_schedule(cfg: HierarchyConfig) -> list[LevelPlan]:
    """Rounded per-depth unit counts for a general-h configuration.

    Depth d=0 is the innermost subcell level of the recursion bookkeeping used
    by :func:`recursive_phase1`; entry d covers units at hierarchy depth d+1
    (cells are depth 1).  Sizes follow the halving exponent schedule rounded
    multiplicatively from the inside out.
    """
    sched = [cfg.b / 2**level for level in range(cfg.h + 1)]
    if cfg.h == 1 and cfg.a is not None:
        sched[1] = cfg.a
    sizes = [max(1, round(cfg.n ** sched[-1]))]
    for level in range(cfg.h - 1, -1, -1):
        ratio = max(1, round(cfg.n ** (sched[level] - sched[level + 1])))
        sizes.append(sizes[-1] * ratio)
    sizes.reverse()  # sizes[0] = nodes per top cell, sizes[-1] = innermost
    cells = max(1, round(cfg.n / sizes[0]))
    plans = []
    units = cells
    for depth, size in enumerate(sizes):
        if depth > 0:
            units *= sizes[depth - 1] // size
        plans.append(LevelPlan(units=units, nodes_per_unit=size))
    return plans


def recursive_phase1(
    level: int,
    schedule: list[LevelPlan],
    rates,
    rng: np.random.Generator,
    trials: int = 1,
) -> np.ndarray:
    """Duration of mega-packet creation at depth `level`, all units in parallel.

    At the deepest level each unit runs a plain TDMA round (every node
    broadcasts to the rest of its unit).  Above it, the three-phase scheme is
    composed: children build their packets recursively, exchange them with
    MIMO-like rounds (children take turns inside each unit), then broadcast
    each received packet within the child unit.
    """
    rates = tuple(rates)
    depth = len(schedule) - 1  # innermost index
    if not 0 <= level <= depth:
        raise ValueError(f"level must lie in [0, {depth}], got {level}")
    for i in range(level, depth):
        if schedule[i + 1].units % schedule[i].units:
            raise ValueError("inconsistent schedule: unit counts must nest")

    def phase1(d: int) -> np.ndarray:
        lvl = schedule[d]
        if d == depth:
            inner_rate = rates[-1]
            return _max_of_sums(
                rng, trials, lvl.units, lvl.nodes_per_unit,
                lvl.nodes_per_unit - 1, 1, inner_rate, False,
            )
        child = schedule[d + 1]
        c = child.units // lvl.units
        t = phase1(d + 1)
        # MIMO between children of one unit, parallel across units; delays at
        # this depth's inter-child rate, sped up by the child's node pairs.
        mimo = _max_of_sums(
            rng, trials, lvl.units, c, c - 1,
            child.nodes_per_unit**2, rates[d + 1], False,
        )
        relay = _max_of_sums(
            rng, trials, child.units, c - 1, child.nodes_per_unit - 1, 1,
            rates[d + 2], False,
        )
        return t + mimo + relay

    return phase1(level)
