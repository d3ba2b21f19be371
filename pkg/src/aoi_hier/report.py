"""Figure rendering for sweep output: scaling plots alongside the CSV."""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .scaling_fit import SlopeFit, fit_scaling_exponent  # noqa: E402


def read_rows(path) -> list[dict[str, str]]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def _age_column(rows: list[dict[str, str]]) -> str:
    for cand in ("delta", "age_empirical"):
        if rows and cand in rows[0]:
            return cand
    raise ValueError("no age column (delta or age_empirical) in input CSV")


def render_scaling_report(rows: list[dict[str, str]], out_dir) -> dict:
    """Render age-versus-n figures and write per-depth slope fits.

    Returns a mapping {h: SlopeFit} for the depths with >= 4 sweep points and
    writes ``age_scaling.png`` plus ``slopes.csv`` into ``out_dir``.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    col = _age_column(rows)
    by_h: dict[int, list[tuple[float, float]]] = {}
    for row in rows:
        by_h.setdefault(int(float(row["h"])), []).append(
            (float(row["n"]), float(row[col]))
        )

    fits: dict[int, SlopeFit] = {}
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    for h, pts in sorted(by_h.items()):
        pts.sort()
        ns = [p[0] for p in pts]
        ages = [p[1] for p in pts]
        line, = ax.loglog(ns, ages, "o-", label=f"h={h}")
        if len(pts) >= 4:
            fit = fit_scaling_exponent(ns, ages)
            fits[h] = fit
            line.set_label(f"h={h} (slope {fit.exponent:.4f})")
    ax.set_xlabel("network size n")
    ax.set_ylabel("average age")
    ax.set_title("Average age versus network size")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_dir / "age_scaling.png", dpi=150)
    plt.close(fig)

    with open(out_dir / "slopes.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["h", "exponent", "intercept", "r_squared", "points"])
        for h, fit in sorted(fits.items()):
            writer.writerow(
                [h, f"{fit.exponent:.12g}", f"{fit.intercept:.12g}",
                 f"{fit.r_squared:.12g}", fit.points]
            )
    return fits
