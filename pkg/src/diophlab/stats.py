"""Estimators and distributional tests for the counting experiments.

Covers the linear growth-rate fit, an exact-tail normal CDF, a
Kolmogorov-Smirnov test against a fitted centered normal, empirical joint
cumulants via the partition sum with bootstrap intervals, and the log-log
growth fit of the error term.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

# Signed growth-rate constant for the classical 1x1 absolute-value case.
GAMMA_1D_SIGNED = 24 * math.log(2) / math.pi ** 2


@dataclass(frozen=True)
class DeviationSample:
    theta_id: str
    T: float
    N_signed: int
    deviation: float

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError("T must be positive")
        if not math.isfinite(self.deviation):
            raise ValueError("deviation must be finite")


@dataclass(frozen=True)
class NormalModel:
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")


@dataclass
class CumulantReport:
    r: int
    estimate: float
    ci_lo: float
    ci_hi: float
    resamples: int


@dataclass
class CLTReport:
    sigma_hat: float
    ks_D: float
    ks_p: float
    cum3: CumulantReport
    cum4: CumulantReport


def estimate_gamma(samples: Sequence[tuple[float, float]]) -> tuple[float, float]:
    """Least-squares slope of N against T through the origin, with a
    heteroskedasticity-consistent standard error.

    With a single distinct T this reduces to mean(N)/T, and the returned
    standard error is the same formula evaluated at that point.
    """
    if len(samples) < 2:
        raise ValueError("need at least two samples")
    T = np.array([float(t) for t, _ in samples])
    N = np.array([float(n) for _, n in samples])
    if np.any(T <= 0):
        raise ValueError("T values must be positive")
    tt = float(np.dot(T, T))
    gamma = float(np.dot(T, N)) / tt
    resid = N - gamma * T
    stderr = math.sqrt(float(np.dot(T * T, resid * resid))) / tt
    return gamma, stderr


def normal_cdf(x: float, model: NormalModel) -> float:
    """CDF of the centered normal with scale sigma, accurate in both tails."""
    return 0.5 * math.erfc(-x / (model.sigma * math.sqrt(2)))


def _kolmogorov_sf(t: float) -> float:
    """Survival function of the Kolmogorov distribution.

    Series 2 sum (-1)^(k-1) exp(-2 k^2 t^2) for larger t; the dual
    theta-series for small t where the first one converges slowly.
    """
    if t <= 0:
        return 1.0
    if t < 1.18:
        # P(K <= t) = sqrt(2 pi)/t * sum exp(-(2k-1)^2 pi^2 / (8 t^2))
        a = math.pi ** 2 / (8 * t * t)
        total = 0.0
        for k in range(1, 20):
            term = math.exp(-((2 * k - 1) ** 2) * a)
            total += term
            if term < 1e-18:
                break
        return 1.0 - math.sqrt(2 * math.pi) / t * total
    total = 0.0
    for k in range(1, 200):
        term = math.exp(-2 * k * k * t * t)
        total += (-term) if k % 2 == 0 else term
        if term < 1e-18:
            break
    return max(0.0, min(1.0, 2 * total))


def ks_test(deviations: Sequence[float], model: NormalModel) -> tuple[float, float]:
    """Sup-distance between the empirical CDF and the model CDF, with the
    asymptotic Kolmogorov p-value at sqrt(n) * D."""
    n = len(deviations)
    if n < 20:
        raise ValueError("need at least 20 samples")
    xs = np.sort(np.asarray(deviations, dtype=float))
    cdf = np.array([normal_cdf(x, model) for x in xs])
    upper = np.arange(1, n + 1) / n - cdf
    lower = cdf - np.arange(0, n) / n
    D = float(max(upper.max(), lower.max()))
    p = _kolmogorov_sf(math.sqrt(n) * D)
    return D, p


def _set_partitions(items: list[int]):
    """All partitions of a list, as lists of blocks."""
    if len(items) == 1:
        yield [items]
        return
    first, rest = items[0], items[1:]
    for smaller in _set_partitions(rest):
        for i, block in enumerate(smaller):
            yield smaller[:i] + [[first] + block] + smaller[i + 1:]
        yield [[first]] + smaller


def _cumulant_from_moments(moments: Sequence[float], r: int) -> float:
    """Partition sum over raw moments: sum over partitions P of
    (-1)^(|P|-1) (|P|-1)! prod_{blocks} m_{|block|}."""
    total = 0.0
    for part in _set_partitions(list(range(r))):
        blocks = len(part)
        prod = 1.0
        for block in part:
            prod *= moments[len(block)]
        total += (-1) ** (blocks - 1) * math.factorial(blocks - 1) * prod
    return total


def empirical_cumulant(samples: np.ndarray, r: int) -> float:
    """Order-r cumulant of the empirical distribution (biased moments)."""
    moments = [1.0] + [float(np.mean(samples ** k)) for k in range(1, r + 1)]
    return _cumulant_from_moments(moments, r)


def joint_cumulant(samples: Sequence[float], r: int,
                   resamples: int = 1000, seed: int = 0) -> CumulantReport:
    """Empirical cumulant of order r with a seeded bootstrap percentile CI.

    The interval is widened, if necessary, to contain the point estimate.
    """
    if not 2 <= r <= 6:
        raise ValueError("r must be between 2 and 6")
    if len(samples) < 50:
        raise ValueError("need at least 50 samples")
    xs = np.asarray(samples, dtype=float)
    estimate = empirical_cumulant(xs, r)
    n = len(xs)
    boot = np.empty(resamples)
    for b in range(resamples):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(b,)))
        idx = rng.integers(0, n, size=n)
        boot[b] = empirical_cumulant(xs[idx], r)
    lo, hi = np.percentile(boot, [2.5, 97.5])
    return CumulantReport(r, estimate, min(float(lo), estimate),
                          max(float(hi), estimate), resamples)


def clt_suite(deviations: Sequence[float], resamples: int = 1000,
              seed: int = 0) -> CLTReport:
    """Normality battery: fitted sigma, KS against the fitted centered
    normal, and bootstrap cumulant reports of orders 3 and 4."""
    if len(deviations) < 500:
        raise ValueError("need at least 500 deviations")
    xs = np.asarray(deviations, dtype=float)
    sigma_hat = float(np.std(xs, ddof=1))
    D, p = ks_test(xs, NormalModel(sigma_hat))
    cum3 = joint_cumulant(xs, 3, resamples, seed)
    cum4 = joint_cumulant(xs, 4, resamples, seed + 1)
    return CLTReport(sigma_hat, D, p, cum3, cum4)


def error_exponent_fit(rows: Sequence[tuple[float, float]]) -> tuple[float, float]:
    """Least-squares slope of log(rms deviation) against log(T), plus R^2.

    Nonpositive rms values cannot be log-transformed and are dropped with a
    warning.
    """
    usable = [(t, r) for t, r in rows if r > 0]
    dropped = len(rows) - len(usable)
    if dropped:
        warnings.warn(f"dropped {dropped} rows with nonpositive rms values")
    ts = sorted({t for t, _ in usable})
    if len(ts) < 4:
        raise ValueError("need at least 4 distinct T values")
    if max(ts) / min(ts) < 8:
        raise ValueError("T values must span at least a factor of 8")
    x = np.log([t for t, _ in usable])
    y = np.log([r for _, r in usable])
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(slope), r2
