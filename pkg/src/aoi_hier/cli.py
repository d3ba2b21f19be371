"""Command-line harness: analytic evaluation, simulation, sweeps, exponent
optimization, TDMA validation, and figure reports.

Subcommands write CSV to --out (or standard output) and diagnostics to
standard error.  Exit codes: 0 success, 2 invalid configuration, 3 internal
numeric failure.  The seed falls back to the AOI_SEED environment variable.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from .geometry import validate_tdma_worst_case
from .hierarchy import (
    HierarchyConfig,
    average_age_analytic,
    optimize_exponents,
    session_moments,
)
from .simulator import run_experiment

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _write_csv(header, rows, out_path) -> None:
    fh = open(out_path, "w", newline="") if out_path else sys.stdout
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    finally:
        if out_path:
            fh.close()


def _load_config(path) -> dict:
    if not path:
        return {}
    with open(path) as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise ValueError("config file must hold a flat JSON object")
    return cfg


def _seed(args, config) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    if "seed" in config:
        return int(config["seed"])
    env = os.environ.get("AOI_SEED")
    if env is not None:
        return int(env)
    return 0


def _parse_values(raw) -> list[float]:
    if raw is None:
        return []
    if isinstance(raw, (list, tuple)):
        return [float(v) for v in raw]
    return [float(v) for v in str(raw).split(",") if v]


def _rates(args, config, h: int) -> tuple[float, ...]:
    named = []
    for i in range(h + 2):
        flag = getattr(args, f"lambda{i}", None) if i <= 2 else None
        if flag is None:
            flag = config.get(f"lambda{i}")
        named.append(float(flag) if flag is not None else 1.0)
    return tuple(named)


def _exponents(args, config, h: int) -> tuple[float | None, float]:
    mode = getattr(args, "exponents", None) or config.get("exponents", "optimal")
    a = getattr(args, "a", None)
    b = getattr(args, "b", None)
    if a is None:
        a = config.get("a")
    if b is None:
        b = config.get("b")
    if mode == "fixed" or b is not None:
        if b is None:
            raise ValueError("fixed exponent mode requires --b")
        return (float(a) if a is not None else None, float(b))
    cfg = HierarchyConfig.optimal(100.0, h)
    return cfg.a, cfg.b


def _config_for(n: float, h: int, a, b, rates) -> HierarchyConfig:
    return HierarchyConfig(n=n, h=h, b=b, a=a if h >= 1 else None, rates=rates)


ANALYTIC_HEADER = [
    "n", "h", "a", "b", "mode", "delta",
    "phase1_mean", "phase2_mean", "phase3_mean",
]


def _analytic_row(n, h, a, b, rates, mode, rounded):
    cfg = _config_for(n, h, a, b, rates)
    pm = session_moments(cfg, mode=mode, rounded=rounded)
    delta = average_age_analytic(cfg, mode=mode, rounded=rounded)
    return [
        n, h, a if a is not None else "", b, mode, delta,
        pm.phase1.mean, pm.phase2.mean, pm.phase3.mean,
    ]


def cmd_analytic(args, config) -> int:
    ns = _parse_values(args.n) or _parse_values(config.get("n"))
    if not ns:
        raise ValueError("analytic requires at least one --n value")
    h = args.h if args.h is not None else int(config.get("h", 1))
    a, b = _exponents(args, config, h)
    rates = _rates(args, config, h)
    rows = [
        _analytic_row(n, h, a, b, rates, args.mode, args.rounded) for n in ns
    ]
    _write_csv(ANALYTIC_HEADER, rows, args.out)
    return EXIT_OK


SIMULATE_HEADER = [
    "n", "h", "a", "b", "variant", "trials", "seed",
    "age_empirical", "age_ci_half_width", "age_analytic",
    "phase1_mean_emp", "phase2_mean_emp", "phase3_mean_emp",
    "phase1_m2_emp", "phase2_m2_emp", "phase3_m2_emp",
    "phase1_mean_analytic", "phase2_mean_analytic", "phase3_mean_analytic",
]


def _simulate_row(n, h, a, b, rates, trials, seed, variant):
    cfg = _config_for(n, h, a, b, rates)
    result = run_experiment(cfg, trials, seed, variant=variant)
    pm = session_moments(cfg, mode="exact", rounded=True)
    delta = average_age_analytic(cfg, mode="exact", rounded=True)
    emp = result.phase_moments
    return [
        n, h, a if a is not None else "", b, variant, trials, seed,
        result.age.mean_age, result.age.half_width, delta,
        emp["phase1"].mean, emp["phase2"].mean, emp["phase3"].mean,
        emp["phase1"].second_moment, emp["phase2"].second_moment,
        emp["phase3"].second_moment,
        pm.phase1.mean, pm.phase2.mean, pm.phase3.mean,
    ]


def cmd_simulate(args, config) -> int:
    ns = _parse_values(args.n) or _parse_values(config.get("n"))
    if not ns:
        raise ValueError("simulate requires at least one --n value")
    h = args.h if args.h is not None else int(config.get("h", 1))
    trials = args.trials if args.trials is not None else int(config.get("trials", 0))
    if trials < 100:
        raise ValueError("simulate requires --trials >= 100")
    a, b = _exponents(args, config, h)
    rates = _rates(args, config, h)
    seed = _seed(args, config)
    rows = [
        _simulate_row(n, h, a, b, rates, trials, seed, args.variant) for n in ns
    ]
    _write_csv(SIMULATE_HEADER, rows, args.out)
    return EXIT_OK


def cmd_optimize(args, config) -> int:
    h = args.h if args.h is not None else int(config.get("h", 1))
    choice = optimize_exponents(h)
    rows = [[h, choice.a if choice.a is not None else "", choice.b, choice.exponent]]
    _write_csv(["h", "a_star", "b_star", "exponent"], rows, args.out)
    return EXIT_OK


def cmd_validate_tdma(args, config) -> int:
    verdict = validate_tdma_worst_case(args.grid_side, args.gamma)
    rows = [[args.grid_side, args.gamma, "PASS" if verdict.feasible else "FAIL",
             len(verdict.violations)]]
    _write_csv(["grid_side", "gamma", "verdict", "violations"], rows, args.out)
    for v in verdict.violations[:50]:
        print(
            f"violation: link {v.receiver} vs interferer {v.interferer}: "
            f"distance {v.distance:.6g} < required {v.required:.6g}",
            file=sys.stderr,
        )
    return EXIT_OK


def _sweep_point(point):
    kind, index, n, h, a, b, rates, trials, seed, variant = point
    if kind == "analytic":
        return index, _analytic_row(n, h, a, b, rates, "approx", False)
    return index, _simulate_row(n, h, a, b, rates, trials, seed + index, variant)


def cmd_sweep(args, config) -> int:
    ns = _parse_values(args.n) or _parse_values(config.get("n"))
    hs = [int(v) for v in (_parse_values(args.h_list) or _parse_values(config.get("h", [1])))]
    if not ns or not hs:
        raise ValueError("sweep requires --n and --h-list values")
    mode = args.mode or config.get("mode", "analytic")
    trials = args.trials if args.trials is not None else int(config.get("trials", 1000))
    if mode == "simulate" and trials < 100:
        raise ValueError("simulate sweeps require trials >= 100")
    seed = _seed(args, config)
    points = []
    index = 0
    for h in hs:
        a, b = _exponents(args, config, h)
        rates = _rates(args, config, h)
        for n in ns:
            points.append(
                (mode, index, n, h, a, b, rates, trials, seed, args.variant)
            )
            index += 1
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            results = list(pool.map(_sweep_point, points))
    else:
        results = [_sweep_point(p) for p in points]
    results.sort(key=lambda item: item[0])
    header = ANALYTIC_HEADER if mode == "analytic" else SIMULATE_HEADER
    _write_csv(header, [row for _, row in results], args.out)
    return EXIT_OK


def cmd_report(args, config) -> int:
    from .report import read_rows, render_scaling_report

    rows = read_rows(args.input)
    fits = render_scaling_report(rows, args.out_dir)
    for h, fit in sorted(fits.items()):
        print(
            f"h={h}: exponent {fit.exponent:.4f} (r^2 {fit.r_squared:.4f}, "
            f"{fit.points} points)",
            file=sys.stderr,
        )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aoi-hier",
        description="Average-age analysis and simulation of the hierarchical "
        "three-phase update scheme",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seeded=False):
        p.add_argument("--config", help="flat JSON config file")
        p.add_argument("--out", help="output CSV path (default: stdout)")
        if seeded:
            p.add_argument("--seed", type=int, help="rng seed (AOI_SEED fallback)")

    def exponents(p):
        p.add_argument("--exponents", choices=["optimal", "fixed"])
        p.add_argument("--a", type=float, help="subcell exponent")
        p.add_argument("--b", type=float, help="cell exponent")

    def rates(p):
        p.add_argument("--lambda0", type=float, help="inter-cell delay rate")
        p.add_argument("--lambda1", type=float, help="inter-subcell delay rate")
        p.add_argument("--lambda2", type=float, help="intra-subcell delay rate")

    p = sub.add_parser("analytic", help="closed-form age over a list of n")
    common(p)
    p.add_argument("--n", help="comma-separated network sizes")
    p.add_argument("--h", type=int, help="hierarchy depth")
    p.add_argument("--mode", choices=["exact", "approx"], default="approx")
    p.add_argument("--rounded", action="store_true", help="integer grid counts")
    exponents(p)
    rates(p)
    p.set_defaults(func=cmd_analytic)

    p = sub.add_parser("simulate", help="Monte Carlo session simulation")
    common(p, seeded=True)
    p.add_argument("--n", help="comma-separated network sizes")
    p.add_argument("--h", type=int, help="hierarchy depth")
    p.add_argument("--trials", type=int)
    p.add_argument("--variant", choices=["bounded", "exact"], default="bounded")
    exponents(p)
    rates(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("optimize", help="scaling-optimal exponents for depth h")
    common(p)
    p.add_argument("--h", type=int, help="hierarchy depth")
    rates(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("validate-tdma", help="worst-case 9-TDMA feasibility")
    common(p)
    p.add_argument("--grid-side", type=int, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.set_defaults(func=cmd_validate_tdma)

    p = sub.add_parser("sweep", help="(n, h) sweep, analytic or simulated")
    common(p, seeded=True)
    p.add_argument("--n", help="comma-separated network sizes")
    p.add_argument("--h-list", help="comma-separated hierarchy depths")
    p.add_argument("--mode", choices=["analytic", "simulate"])
    p.add_argument("--trials", type=int)
    p.add_argument("--variant", choices=["bounded", "exact"], default="bounded")
    p.add_argument("--workers", type=int, default=1)
    exponents(p)
    rates(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("report", help="render scaling figures from a sweep CSV")
    p.add_argument("--input", required=True, help="sweep CSV to read")
    p.add_argument("--out-dir", required=True, help="directory for figures")
    p.add_argument("--config", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _load_config(getattr(args, "config", None))
        return args.func(args, config)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ArithmeticError as exc:  # pragma: no cover
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
