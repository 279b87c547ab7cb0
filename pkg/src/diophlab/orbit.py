"""Window counts along the flow orbit and their statistics.

The value at integer time i is the window count of the flowed lattice built
from a target matrix.  For every shell index M the signed number of best
approximations with e^M <= ||q|| < e^(M+1) equals that count exactly; this
module computes both sides independently and compares them, and also
estimates the lag autocovariance of the orbit values over an ensemble of
targets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .bestapprox import TargetMatrix, enumerate_best_approximations
from .lattice import INDETERMINATE, EnumerationBudgetError, apply_flow, window_count, make_unipotent
from .norms import ProductNormSpec


@dataclass
class OrbitSeries:
    theta_ref: str
    N: int
    values: list  # ints, INDETERMINATE, or None past a budget truncation
    precision_used: int
    indeterminate_count: int
    margins: list = None  # comparison margin per entry, parallel to values

    def conclusive(self, i: int) -> bool:
        v = self.values[i]
        return v is not INDETERMINATE and v is not None


def birkhoff_series(theta: TargetMatrix, N: int,
                    norms: Optional[ProductNormSpec] = None,
                    precision: int = 128,
                    retry_double_precision: bool = True) -> OrbitSeries:
    """Window counts at integer flow times 0..N-1.

    An indeterminate entry is retried once at doubled guard precision, which
    halves the guard band; entries that stay indeterminate are recorded as
    such, never imputed.  A budget overrun truncates the series with None
    marks from that time on.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    base = make_unipotent(theta, norms, precision)
    values = []
    margins = []
    indet = 0
    for i in range(N):
        try:
            res = window_count(apply_flow(base, i))
            if not res.conclusive and retry_double_precision:
                retry_base = make_unipotent(theta, norms, 2 * precision)
                res = window_count(apply_flow(retry_base, i))
            margins.append(res.margin)
            if res.conclusive:
                values.append(res.value)
            else:
                values.append(INDETERMINATE)
                indet += 1
        except EnumerationBudgetError:
            values.extend([None] * (N - i))
            margins.extend([math.nan] * (N - i))
            break
    return OrbitSeries(theta.key(), N, values, precision, indet, margins)


def shell_histogram(theta: TargetMatrix, T: int,
                    norms: Optional[ProductNormSpec] = None,
                    sign_mode: str = "signed") -> dict[int, int]:
    """Counts of best approximations per shell index M < T, from one
    enumeration with cut-off e^T."""
    seq = enumerate_best_approximations(theta, T=T, norms=norms, sign_mode=sign_mode)
    hist: dict[int, int] = {}
    for rec in seq.records:
        if rec.shell_index < T:
            hist[rec.shell_index] = hist.get(rec.shell_index, 0) + 1
    return hist


def shell_counts_via_bestapprox(theta: TargetMatrix, M: int,
                                norms: Optional[ProductNormSpec] = None) -> int:
    """Signed number of best approximations with e^M <= ||q|| < e^(M+1)."""
    if M < 0:
        raise ValueError("M must be >= 0")
    return shell_histogram(theta, M + 1, norms).get(M, 0)


@dataclass
class ShellReport:
    M: int
    count_bestapprox: int
    f_value: object  # int or INDETERMINATE
    match: bool
    margin: float = math.inf
    degenerate: bool = False  # shell past the exhaustion of a rational target

    @property
    def conclusive(self) -> bool:
        return self.f_value is not INDETERMINATE and self.f_value is not None

    @property
    def margin_ok(self) -> bool:
        return self.match or not self.conclusive


def verify_correspondence(theta: TargetMatrix, T: int,
                          norms: Optional[ProductNormSpec] = None,
                          precision: int = 128) -> list[ShellReport]:
    """Shell-by-shell comparison of best-approximation counts with the orbit
    window counts for M = 0..T-1.  Matches are exact; indeterminate window
    values are reported, not judged.
    """
    if T < 1:
        raise ValueError("T must be >= 1")
    series = birkhoff_series(theta, T, norms, precision)
    seq = enumerate_best_approximations(theta, T=T, norms=norms, sign_mode="signed")
    hist: dict[int, int] = {}
    exhaust_shell = None
    for rec in seq.records:
        hist[rec.shell_index] = hist.get(rec.shell_index, 0) + 1
        if rec.err.is_zero():
            exhaust_shell = rec.shell_index
    reports = []
    for M in range(T):
        fv = series.values[M]
        count = hist.get(M, 0)
        conclusive = fv is not INDETERMINATE and fv is not None
        match = bool(conclusive and fv == count)
        degenerate = exhaust_shell is not None and M > exhaust_shell
        reports.append(ShellReport(M, count, fv if fv is not None else INDETERMINATE,
                                   match, series.margins[M], degenerate))
    return reports


@dataclass
class XiEstimate:
    s: int
    xi_hat: float
    stderr: float
    sample_count: int
    low_confidence: bool = False


def autocovariance(ensemble: Sequence[OrbitSeries], s_max: int,
                   burn_in: int = 10) -> list[XiEstimate]:
    """Lag autocovariance of orbit values, pooled over the ensemble.

    Products (v[i+s] - mean)(v[i] - mean) are averaged over all conclusive
    pairs with i >= burn_in, using the pooled grand mean; the standard error
    comes from batch means across the ensemble members.
    """
    if s_max < 0 or burn_in < 0:
        raise ValueError("s_max and burn_in must be nonnegative")
    need = burn_in + s_max + 30
    for series in ensemble:
        if series.N < need:
            raise ValueError(f"series length {series.N} below required {need}")

    total = 0.0
    count = 0
    for series in ensemble:
        for i in range(burn_in, series.N):
            if series.conclusive(i):
                total += series.values[i]
                count += 1
    if count == 0:
        raise ValueError("no conclusive values in the ensemble")
    mean = total / count

    out = []
    for s in range(s_max + 1):
        per_series = []
        pooled_sum = 0.0
        pooled_n = 0
        for series in ensemble:
            acc = 0.0
            k = 0
            for i in range(burn_in, series.N - s):
                if series.conclusive(i) and series.conclusive(i + s):
                    acc += (series.values[i + s] - mean) * (series.values[i] - mean)
                    k += 1
            if k > 0:
                per_series.append(acc / k)
                pooled_sum += acc
                pooled_n += k
        if pooled_n == 0:
            out.append(XiEstimate(s, math.nan, math.nan, 0, True))
            continue
        xi = pooled_sum / pooled_n
        if len(per_series) >= 2:
            mu_b = sum(per_series) / len(per_series)
            var_b = sum((x - mu_b) ** 2 for x in per_series) / (len(per_series) - 1)
            stderr = math.sqrt(var_b / len(per_series))
        else:
            stderr = math.nan
        low = pooled_n < 30 or len(per_series) < 2
        out.append(XiEstimate(s, xi, stderr, pooled_n, low))
    return out


def variance_from_autocovariance(estimates: Sequence[XiEstimate]) -> float:
    """Two-sided sum over the estimated lags: xi(0) + 2 * sum_{s>=1} xi(s)."""
    total = 0.0
    for est in estimates:
        if math.isnan(est.xi_hat):
            continue
        total += est.xi_hat if est.s == 0 else 2 * est.xi_hat
    return total
