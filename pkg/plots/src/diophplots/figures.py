"""Figure builders over the experiment CSV tables.

Each builder validates the exact column schema of its input, renders one
static image, and returns the annotations it printed (so callers and tests
can check them).  Rendering is deterministic: fixed geometry, no clock or
RNG input.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


class SchemaError(ValueError):
    """Input CSV does not match the documented schema."""


_SCHEMAS = {
    "lk": ["theta_id", "T", "N_signed", "N_unsigned"],
    "deviations": ["theta_id", "T", "N_signed", "deviation"],
    "clt_summary": ["sigma_hat", "ks_D", "ks_p", "cum3", "cum4",
                    "var_consistency_ratio"],
    "xi": ["s", "xi_hat", "stderr", "n_pairs"],
}


def read_table(path, kind: str) -> list[dict]:
    expected = _SCHEMAS[kind]
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"{path}: file not found")
    with open(path) as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        if header != expected:
            raise SchemaError(f"{path}: header {header} != expected {expected}")
        rows = [dict(zip(expected, row)) for row in reader]
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows


def _floats(rows, key):
    try:
        return np.array([float(r[key]) for r in rows])
    except ValueError as exc:
        raise SchemaError(f"non-numeric value in column {key!r}: {exc}") from None


def origin_slope(T: np.ndarray, N: np.ndarray) -> float:
    """Least-squares slope of N against T through the origin."""
    return float(np.dot(T, N) / np.dot(T, T))


@dataclass
class FigureInfo:
    path: str
    labels: dict


def plot_lk(lk_csv, out_path) -> FigureInfo:
    """Counts against the cut-off exponent with the fitted growth line and a
    sqrt-log envelope around it."""
    rows = read_table(lk_csv, "lk")
    T = _floats(rows, "T")
    N = _floats(rows, "N_signed")
    slope = origin_slope(T, N)
    resid = N - slope * T
    env = np.sqrt(T) * np.log(np.maximum(T, 2.0)) ** 1.5
    scaled = np.abs(resid) / env
    c = float(np.quantile(scaled, 0.95)) if len(scaled) > 1 else float(scaled[0])

    fig, ax = plt.subplots(figsize=(7, 5), dpi=120)
    ax.scatter(T, N, s=12, alpha=0.35, color="#1f77b4", label="signed counts")
    grid = np.linspace(min(T.min(), 1.0), T.max() * 1.02, 200)
    ax.plot(grid, slope * grid, color="#d62728",
            label=f"fit slope = {slope:.4f}")
    env_grid = np.sqrt(grid) * np.log(np.maximum(grid, 2.0)) ** 1.5
    ax.plot(grid, slope * grid + c * env_grid, "--", color="#555555", lw=0.9,
            label=f"$\\pm {c:.2f}\\,\\sqrt{{T}}\\,\\log^{{3/2}} T$")
    ax.plot(grid, slope * grid - c * env_grid, "--", color="#555555", lw=0.9)
    ax.set_xlabel("T")
    ax.set_ylabel("N(T)")
    ax.set_title("Counting growth with fitted rate")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return FigureInfo(str(out_path), {"slope": f"{slope:.4f}", "envelope_c": f"{c:.2f}"})


def plot_clt_hist(deviations_csv, clt_summary_csv, out_path) -> FigureInfo:
    """Histogram of the normalized deviations with the fitted centered
    normal density and a quantile-quantile panel."""
    rows = read_table(deviations_csv, "deviations")
    if len(rows) < 2:
        raise SchemaError("need at least two deviation rows")
    devs = _floats(rows, "deviation")
    summary = read_table(clt_summary_csv, "clt_summary")[0]
    sigma = float(summary["sigma_hat"])
    ks_d = float(summary["ks_D"])
    ks_p = float(summary["ks_p"])

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4.6), dpi=120)
    ax1.hist(devs, bins=40, density=True, alpha=0.6, color="#1f77b4")
    grid = np.linspace(devs.min() - 1, devs.max() + 1, 400)
    dens = np.exp(-0.5 * (grid / sigma) ** 2) / (sigma * math.sqrt(2 * math.pi))
    ax1.plot(grid, dens, color="#d62728",
             label=f"$\\sigma$ = {sigma:.3f}")
    ax1.annotate(f"KS D = {ks_d:.4f}\np = {ks_p:.3g}", xy=(0.02, 0.95),
                 xycoords="axes fraction", va="top", fontsize=9)
    ax1.set_xlabel("deviation")
    ax1.set_ylabel("density")
    ax1.legend()
    _qq_axes(ax2, devs, sigma)
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return FigureInfo(str(out_path), {"sigma": f"{sigma:.3f}", "ks_D": f"{ks_d:.4f}"})


def _normal_quantile(u: float) -> float:
    from statistics import NormalDist

    return NormalDist().inv_cdf(u)


def _qq_axes(ax, devs, sigma):
    xs = np.sort(devs)
    n = len(xs)
    qs = np.array([_normal_quantile((i + 0.5) / n) * sigma for i in range(n)])
    ax.scatter(qs, xs, s=6, alpha=0.4, color="#1f77b4")
    lo, hi = min(qs.min(), xs.min()), max(qs.max(), xs.max())
    ax.plot([lo, hi], [lo, hi], color="#d62728", lw=1)
    ax.set_xlabel("model quantiles")
    ax.set_ylabel("empirical quantiles")
    ax.set_title("quantile-quantile")


def plot_qq(deviations_csv, out_path) -> FigureInfo:
    """Standalone quantile-quantile panel against the fitted centered normal."""
    rows = read_table(deviations_csv, "deviations")
    if len(rows) < 2:
        raise SchemaError("need at least two deviation rows")
    devs = _floats(rows, "deviation")
    sigma = float(np.std(devs, ddof=1))
    fig, ax = plt.subplots(figsize=(5.4, 5), dpi=120)
    _qq_axes(ax, devs, sigma)
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return FigureInfo(str(out_path), {"sigma": f"{sigma:.3f}"})


def plot_xi_decay(xi_csv, out_path) -> FigureInfo:
    """Log-scale |xi| against the lag with error bars and a fitted
    exponential guide through the nonzero estimates."""
    rows = read_table(xi_csv, "xi")
    s = _floats(rows, "s")
    xi = _floats(rows, "xi_hat")
    err = _floats(rows, "stderr")
    mags = np.abs(xi)
    floor = max(mags.max() * 1e-6, 1e-12)
    clipped = np.maximum(mags, floor)

    mask = (mags > floor) & (s >= 1)
    if mask.sum() >= 2:
        coef = np.polyfit(s[mask], np.log(clipped[mask]), 1)
        rate = -float(coef[0])
    else:
        coef, rate = None, float("nan")

    fig, ax = plt.subplots(figsize=(7, 5), dpi=120)
    ax.errorbar(s, clipped, yerr=np.minimum(err, clipped * 0.999), fmt="o",
                ms=4, lw=1, capsize=2, color="#1f77b4", label="|autocovariance|")
    if coef is not None:
        grid = np.linspace(s.min(), s.max(), 100)
        ax.plot(grid, np.exp(coef[1] + coef[0] * grid), "--", color="#d62728",
                label=f"exp fit, rate = {rate:.3f}")
    ax.set_yscale("log")
    ax.set_xlabel("lag s")
    ax.set_ylabel("|xi(s)|")
    ax.set_title("Autocovariance decay")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return FigureInfo(str(out_path), {"rate": f"{rate:.3f}"})
