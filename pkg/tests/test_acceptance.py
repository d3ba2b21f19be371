"""Acceptance gate: ten end-to-end checks at pinned tolerances.

Each test prints exactly one PASS/FAIL line (visible with ``pytest -s`` or in
captured output) and asserts the same condition, so the suite result is the
gate.  Seeds are pinned: every run is deterministic.
"""

import math
import time
from fractions import Fraction

import numpy as np
from scipy import stats

from aoi_hier.age_renewal import SessionTrace, time_average_from_trace
from aoi_hier.geometry import validate_tdma_worst_case
from aoi_hier.hierarchy import (
    HierarchyConfig,
    alpha,
    average_age_analytic,
    exact_mimo_phase_mean,
    optimize_exponents,
)
from aoi_hier.order_stats import (
    OrderStatSpec,
    expected_order_stat,
    sample_all_order_stats,
    second_moment_order_stat,
    variance_order_stat,
)
from aoi_hier.scaling_fit import fit_scaling_exponent
from aoi_hier.simulator import run_experiment, simulate_sessions


def _report(num: int, label: str, ok: bool, detail: str, t0: float) -> None:
    verdict = "PASS" if ok else "FAIL"
    print(f"[{verdict}] criterion {num} ({label}): {detail} "
          f"[{time.time() - t0:.1f}s]")
    assert ok, f"criterion {num} ({label}): {detail}"


def test_criterion_01_order_statistic_suite():
    t0 = time.time()
    rng = np.random.default_rng(0)
    worst_mean_z = worst_var_z = 0.0
    for lam in (0.5, 1.0, 2.0):
        for n in range(1, 33):
            x = sample_all_order_stats(n, lam, 100_000, rng)
            for k in range(1, n + 1):
                col = x[:, k - 1]
                spec = OrderStatSpec(k, n, lam)
                se = col.std(ddof=1) / math.sqrt(len(col))
                z = abs(col.mean() - expected_order_stat(spec)) / se
                worst_mean_z = max(worst_mean_z, z)
                v = col.var(ddof=1)
                m4 = float(np.mean((col - col.mean()) ** 4))
                se_v = math.sqrt(max(m4 - v**2, 1e-300) / len(col))
                zv = abs(v - variance_order_stat(spec)) / se_v
                worst_var_z = max(worst_var_z, zv)
    worst_rel = 0.0
    for n in range(1, 65):
        for k in range(1, n + 1):
            spec = OrderStatSpec(k, n, 1.3)
            lhs = second_moment_order_stat(spec)
            rhs = expected_order_stat(spec) ** 2 + variance_order_stat(spec)
            worst_rel = max(worst_rel, abs(lhs - rhs) / rhs)
    ok = worst_mean_z <= 4 and worst_var_z <= 4 and worst_rel <= 1e-12
    _report(
        1, "order statistics", ok,
        f"max |z| mean {worst_mean_z:.2f}, var {worst_var_z:.2f} (<= 4); "
        f"moment identity rel err {worst_rel:.2e} (<= 1e-12)", t0,
    )


def test_criterion_02_renewal_age_trace():
    t0 = time.time()
    rng = np.random.default_rng(202)
    y = rng.exponential(1.0, 100_000)
    est = time_average_from_trace(SessionTrace(y))
    err = abs(est.mean_age - 2.0) / 2.0
    _report(
        2, "renewal age", err <= 0.01,
        f"trace average {est.mean_age:.4f} vs 2.0, rel err {err:.4%} (<= 1%)",
        t0,
    )


def test_criterion_03_mimo_phase_exactness():
    t0 = time.time()
    cfg = HierarchyConfig(n=16.0, h=0, b=0.5, a=None)
    out = simulate_sessions(cfg, 100_000, seed=33, variant="exact")
    target = exact_mimo_phase_mean(cfg)
    assert abs(target - 25 / 48) < 1e-12
    se = out["y2"].std(ddof=1) / math.sqrt(len(out["y2"]))
    z = abs(out["y2"].mean() - target) / se
    _report(
        3, "MIMO phase mean", z <= 4,
        f"E[Y_II] {out['y2'].mean():.5f} vs 25/48 = {target:.5f}, "
        f"|z| {z:.2f} (<= 4)", t0,
    )


def test_criterion_04_bound_dominance_large_n():
    t0 = time.time()
    cfg = HierarchyConfig.optimal(float(2**14), 1)
    trials = 100_000
    exact = simulate_sessions(cfg, trials, seed=3, variant="exact")
    bound = simulate_sessions(cfg, trials, seed=3, variant="bounded")
    details = []
    ok = True
    for key, label in (("y1", "Y_I"), ("y3", "Y_III")):
        se = math.hypot(
            exact[key].std(ddof=1), bound[key].std(ddof=1)
        ) / math.sqrt(trials)
        gap = exact[key].mean() - bound[key].mean()
        ok = ok and gap <= 4 * se
        details.append(f"{label}: exact {exact[key].mean():.2f} <= "
                       f"bound {bound[key].mean():.2f} + 4se")
    _report(4, "phase bounds dominate", ok, "; ".join(details), t0)


def test_criterion_05_analytic_vs_simulated_age():
    t0 = time.time()
    cfg = HierarchyConfig.optimal(4096.0, 1)
    res = run_experiment(cfg, 100_000, seed=7, variant="bounded")
    delta = average_age_analytic(cfg, mode="exact", rounded=True)
    lo = res.age.mean_age - res.age.half_width
    hi = res.age.mean_age + res.age.half_width
    _report(
        5, "analytic age inside simulator CI", lo <= delta <= hi,
        f"analytic {delta:.3f} in [{lo:.3f}, {hi:.3f}]", t0,
    )


def test_criterion_06_scaling_slopes():
    t0 = time.time()
    ns = np.logspace(6, 12, 7)
    slopes = {}
    for h in (0, 1):
        ages = [
            average_age_analytic(HierarchyConfig.optimal(n, h), mode="approx")
            for n in ns
        ]
        slopes[h] = fit_scaling_exponent(ns, ages).exponent
    pred2 = optimize_exponents(2).exponent
    ok = (
        abs(slopes[0] - 0.25) <= 0.02
        and abs(slopes[1] - 0.1429) <= 0.02
        and abs(pred2 - 1 / 13) <= 0.01
    )
    _report(
        6, "scaling slopes", ok,
        f"h=0 slope {slopes[0]:.4f} (0.25 +/- 0.02), "
        f"h=1 slope {slopes[1]:.4f} (0.1429 +/- 0.02), "
        f"h=2 predicted {pred2:.4f} (1/13 +/- 0.01)", t0,
    )


def test_criterion_07_optimizer_rate_invariance():
    t0 = time.time()
    worst = 0.0
    for l0 in (0.1, 1.0, 10.0):
        for l1 in (0.1, 1.0, 10.0):
            for l2 in (0.1, 1.0, 10.0):
                choice = optimize_exponents(1, rates=(l0, l1, l2))
                worst = max(
                    worst, abs(choice.a - 1 / 7), abs(choice.b - 2 / 7)
                )
    elapsed = time.time() - t0
    ok = worst <= 0.01 and elapsed < 10.0
    _report(
        7, "exponent optimizer", ok,
        f"max deviation from (1/7, 2/7) = {worst:.5f} (<= 0.01) over 27 "
        f"rate triples in {elapsed:.2f}s (< 10s)", t0,
    )


def test_criterion_08_alpha_rational_identity():
    t0 = time.time()
    ok = all(alpha(h) * (3 * 2**h + 1) == Fraction(1) for h in range(21))
    ok = ok and all(alpha(h + 1) < alpha(h) for h in range(20))
    _report(
        8, "alpha identity", ok,
        "alpha(h) * (3*2^h + 1) == 1 exactly for h = 0..20, "
        "strictly decreasing", t0,
    )


def test_criterion_09_tdma_worst_case():
    t0 = time.time()
    gamma = math.sqrt(2.0) - 1.0 - 1e-6
    feasible = all(
        validate_tdma_worst_case(side, gamma).feasible for side in range(3, 13)
    )
    # at gamma = 1 every grid with concurrent transmissions (side >= 4)
    # must report violations; a 3x3 grid has one cell per slot
    reported = all(
        len(validate_tdma_worst_case(side, 1.0).violations) > 0
        for side in range(4, 13)
    )
    ok = feasible and reported
    _report(
        9, "9-TDMA feasibility", ok,
        f"grids 3..12 feasible at gamma = sqrt(2)-1-1e-6: {feasible}; "
        f"violations reported at gamma = 1: {reported}", t0,
    )


def test_criterion_10_degenerate_reduction():
    t0 = time.time()
    # h=1 with a single subcell per cell (s=4, c=1, 64 cells) against the
    # h=0 scheme on the same 64 x 4 grid
    cfg_h1 = HierarchyConfig(n=256.0, h=1, b=0.3, a=0.25)
    cfg_h0 = HierarchyConfig(n=256.0, h=0, b=0.25, a=None)
    y1 = simulate_sessions(cfg_h1, 10_000, seed=11, variant="exact")["y"]
    y0 = simulate_sessions(cfg_h0, 10_000, seed=12, variant="exact")["y"]
    p = stats.ks_2samp(y1, y0).pvalue
    _report(
        10, "degenerate reduction", p > 0.01,
        f"KS p-value {p:.3f} (> 0.01) for h=1 (subcells=1) vs h=0 session "
        f"durations", t0,
    )
