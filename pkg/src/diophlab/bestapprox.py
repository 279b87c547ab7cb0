"""Exact enumeration of best approximations of a rational target matrix.

A pair (p, q) with q != 0 is kept exactly when no pair (p', q') outside
{+-(p, q)} satisfies both ||p' + theta q'|| <= ||p + theta q|| and
||q'|| <= ||q||.  Enumeration walks the shells of q in increasing exact
norm, keeping a running minimum of the inner error; ties of any kind
disqualify every tied candidate.  For dyadic targets with the sup norm on
the q side there is a vectorized integer engine that reproduces the exact
scan bit for bit.

A continued-fraction fast path covers the classical 1x1 absolute-value
case; it is validated against the definitional enumeration by the test
suite before being trusted at large cut-offs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .exactexp import ExpThreshold, floor_log
from .norms import (EUCLIDEAN, SUP, NormSpec, NormValue, ProductNormSpec,
                    iter_shells_unbounded, norm_eval)

Rational = Union[Fraction, int]


@dataclass(frozen=True)
class TargetMatrix:
    """An exact rational m x n approximation target."""

    m: int
    n: int
    entries: tuple[tuple[Fraction, ...], ...]
    provenance: str = "user"

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValueError("m and n must be positive")
        if len(self.entries) != self.m or any(len(r) != self.n for r in self.entries):
            raise ValueError("entry shape does not match (m, n)")
        object.__setattr__(
            self, "entries", tuple(tuple(Fraction(x) for x in row) for row in self.entries)
        )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Rational]], provenance: str = "user") -> "TargetMatrix":
        rows = [[Fraction(x) for x in row] for row in rows]
        return cls(len(rows), len(rows[0]), tuple(tuple(r) for r in rows), provenance)

    @classmethod
    def scalar(cls, value: Rational, provenance: str = "user") -> "TargetMatrix":
        return cls.from_rows([[Fraction(value)]], provenance)

    def apply(self, q: Sequence[int]) -> list[Fraction]:
        """The product theta @ q as exact rationals."""
        return [sum((row[j] * q[j] for j in range(self.n)), Fraction(0)) for row in self.entries]

    def key(self) -> str:
        if self.provenance != "user":
            return self.provenance
        flat = ";".join(str(x) for row in self.entries for x in row)
        return f"user:{self.m}x{self.n}:{flat}"


@dataclass(frozen=True)
class BestApproxRecord:
    p: tuple[int, ...]
    q: tuple[int, ...]
    qnorm: NormValue
    err: NormValue
    shell_index: int

    def negated(self) -> "BestApproxRecord":
        return BestApproxRecord(tuple(-x for x in self.p), tuple(-x for x in self.q),
                                self.qnorm, self.err, self.shell_index)


@dataclass
class BestApproxSequence:
    theta: TargetMatrix
    records: list[BestApproxRecord]
    sign_mode: str
    truncation: str
    exhausted_rational: bool = False

    @property
    def count(self) -> int:
        return len(self.records)

    def unsigned_count(self) -> int:
        if self.sign_mode == "signed":
            return len(self.records) // 2
        return len(self.records)

    def shell_histogram(self) -> dict[int, int]:
        hist: dict[int, int] = {}
        for r in self.records:
            hist[r.shell_index] = hist.get(r.shell_index, 0) + 1
        return hist


@dataclass(frozen=True)
class CFExpansion:
    quotients: tuple[int, ...]
    convergents: tuple[tuple[int, int], ...]
    exact: bool  # True when the expansion of the rational is complete


# ---------------------------------------------------------------------------
# Inner minimisation over p


def nearest_residual(theta: TargetMatrix, q: Sequence[int], norm_m: NormSpec
                     ) -> tuple[tuple[int, ...], NormValue, bool]:
    """Minimise ||p + theta q|| over integer p, exactly.

    Coordinate-wise nearest rounding of -theta q is optimal for both norm
    kinds; the minimiser is unique unless some coordinate of theta q is an
    exact half-integer, in which case a second minimiser exists.
    """
    if all(c == 0 for c in q):
        raise ValueError("q must be nonzero")
    x = theta.apply(q)
    p = []
    unique = True
    for xi in x:
        fl = xi.numerator // xi.denominator  # floor
        frac = xi - fl
        if frac > Fraction(1, 2):
            p.append(-(fl + 1))
        elif frac < Fraction(1, 2):
            p.append(-fl)
        else:
            p.append(-fl)  # deterministic pick; flagged non-unique
            unique = False
    resid = [p[i] + x[i] for i in range(theta.m)]
    return tuple(p), norm_eval(resid, norm_m), unique


# ---------------------------------------------------------------------------
# Shell scan, exact rational engine


def _canonical_rep(v: tuple[int, ...]) -> bool:
    """True for the lexicographically positive member of a {v, -v} pair."""
    for c in v:
        if c != 0:
            return c > 0
    return False


class _Cutoff:
    """Inclusive upper cut-off on ||q||: either exact rational or e**T."""

    def __init__(self, norm_n: NormSpec, T: Optional[Rational], qmax: Optional[Rational]):
        if (T is None) == (qmax is None):
            raise ValueError("exactly one of T and qmax must be given")
        self.norm_n = norm_n
        self.qmax = None if qmax is None else Fraction(qmax)
        if self.qmax is not None and self.qmax < 0:
            raise ValueError("qmax must be nonnegative")
        self.T = None if T is None else Fraction(T)
        self._thr: Optional[ExpThreshold] = None
        if self.T is not None:
            # Euclidean values are squared, so compare against e**(2T).
            self._thr = ExpThreshold(2 * self.T if norm_n.kind == EUCLIDEAN else self.T)

    def admits(self, qnorm: NormValue) -> bool:
        if self.qmax is not None:
            if self.norm_n.kind == SUP:
                return qnorm.raw <= self.qmax
            return qnorm.raw <= self.qmax * self.qmax
        return self._thr.admits(qnorm.raw)

    def admits_base_int(self, s: int) -> bool:
        """Cut-off test for an unscaled sup level s (used by the fast engine)."""
        return self.admits(NormValue(self.norm_n.kind, self.norm_n.scale * s))

    def describe(self) -> str:
        return f"qmax={self.qmax}" if self.qmax is not None else f"T={self.T}"


def _shell_index(qnorm: NormValue) -> int:
    """M with e**M <= ||q|| < e**(M+1), decided by certified enclosures."""
    if qnorm.kind == SUP:
        return floor_log(qnorm.raw)
    # raw is the squared norm: e**(2M) <= raw < e**(2M+2)
    twice = floor_log(qnorm.raw)
    if twice % 2 == 0:
        return twice // 2
    # raw in [e**(2M+1), e**(2M+2)) still means M = (twice - 1) // 2
    return (twice - 1) // 2


def enumerate_best_approximations(theta: TargetMatrix,
                                  T: Optional[Rational] = None,
                                  norms: Optional[ProductNormSpec] = None,
                                  sign_mode: str = "signed",
                                  qmax: Optional[Rational] = None,
                                  engine: str = "auto") -> BestApproxSequence:
    """All best approximations of theta with ||q|| below the cut-off.

    The cut-off is either ``qmax`` (exact rational bound on ||q||) or ``T``
    (rational exponent, bound e**T decided by certified enclosures).  Shells
    of q are processed in increasing exact norm; a candidate survives only
    if its inner minimiser is unique, its error is strictly below every
    error seen in earlier shells, and no other q in its own shell matches or
    beats it.  Enumeration stops after the first shell containing an exact
    zero error, with ``exhausted_rational`` set.
    """
    if sign_mode not in ("signed", "unsigned"):
        raise ValueError("sign_mode must be 'signed' or 'unsigned'")
    if norms is None:
        norms = ProductNormSpec.default(theta.m, theta.n)
    if norms.m != theta.m or norms.n != theta.n:
        raise ValueError("norms do not match target dimensions")
    cutoff = _Cutoff(norms.norm_n, T, qmax)

    if engine == "auto":
        engine = "dyadic" if _dyadic_engine_ok(theta, norms) else "exact"
    if engine == "dyadic":
        reps = _scan_dyadic(theta, norms, cutoff)
    elif engine == "exact":
        reps = _scan_exact(theta, norms, cutoff)
    else:
        raise ValueError(f"unknown engine {engine!r}")

    records = []
    exhausted = False
    for q, p, err, qnorm in reps:
        rec = BestApproxRecord(p, q, qnorm, err, _shell_index(qnorm))
        if err.is_zero():
            exhausted = True
        records.append(rec)
        if sign_mode == "signed":
            records.append(rec.negated())
    return BestApproxSequence(theta, records, sign_mode, cutoff.describe(), exhausted)


def _scan_exact(theta: TargetMatrix, norms: ProductNormSpec, cutoff: _Cutoff):
    """Reference scan in pure rational arithmetic, any configuration."""
    out = []
    running_min: Optional[NormValue] = None
    for qnorm, vectors in iter_shells_unbounded(norms.norm_n):
        if not cutoff.admits(qnorm):
            break
        entries = []
        for q in vectors:
            if not _canonical_rep(q):
                continue
            p, err, unique = nearest_residual(theta, q, norms.norm_m)
            entries.append((q, p, err, unique))
        emin = min(e[2] for e in entries)
        holders = [e for e in entries if e[2] == emin]
        if len(holders) == 1:
            q, p, err, unique = holders[0]
            if unique and (running_min is None or err < running_min):
                out.append((q, p, err, qnorm))
        if running_min is None or emin < running_min:
            running_min = emin
        if emin.is_zero():
            break
    return out


# ---------------------------------------------------------------------------
# Vectorized engine for dyadic targets (denominators dividing 2**B, B <= 64)


def _dyadic_bits(theta: TargetMatrix) -> Optional[int]:
    b = 0
    for row in theta.entries:
        for x in row:
            d = x.denominator
            if d & (d - 1):
                return None
            b = max(b, d.bit_length() - 1)
    return b if b <= 64 else None


def _dyadic_engine_ok(theta: TargetMatrix, norms: ProductNormSpec) -> bool:
    if theta.n != 2 or norms.norm_n.kind != SUP:
        return False
    if theta.m > 1 and norms.norm_m.kind != SUP:
        return False
    return _dyadic_bits(theta) is not None


def _sup_ring_reps_2d(s: int) -> tuple[np.ndarray, np.ndarray]:
    """Lexicographically positive vectors of the 2d sup-ring of radius s."""
    side = np.arange(1, s, dtype=np.int64)
    q1 = np.concatenate([np.full(2 * s + 1, s, dtype=np.int64), side, side,
                         np.zeros(1, dtype=np.int64)])
    q2 = np.concatenate([np.arange(-s, s + 1, dtype=np.int64),
                         np.full(s - 1, s, dtype=np.int64),
                         np.full(s - 1, -s, dtype=np.int64),
                         np.full(1, s, dtype=np.int64)])
    return q1, q2


def _scan_dyadic(theta: TargetMatrix, norms: ProductNormSpec, cutoff: _Cutoff):
    """Exact scan over n = 2 sup shells using wrap-around uint64 arithmetic.

    With entries k_ij / 2**B the residual of row i at q is
    (k_i1 q_1 + k_i2 q_2 mod 2**B) / 2**B, and products mod 2**64 reduced by
    the mask give the numerator exactly.  All ordering decisions are made on
    these integer numerators, so the survivors coincide with the rational
    reference scan; surviving records are then rebuilt in exact arithmetic.
    """
    B = _dyadic_bits(theta)
    one = 1 << B
    mask = np.uint64(one - 1)
    half = np.uint64(one >> 1) if B >= 1 else None
    k = [[np.uint64(x.numerator * (one // x.denominator) % one) for x in row]
         for row in theta.entries]

    out = []
    running_min: Optional[int] = None
    s = 0
    while True:
        s += 1
        if not cutoff.admits_base_int(s):
            break
        q1, q2 = _sup_ring_reps_2d(s)
        q1u = q1.astype(np.uint64) & mask
        q2u = q2.astype(np.uint64) & mask
        err = None
        tie = np.zeros(len(q1), dtype=bool)
        for row in k:
            r = (row[0] * q1u + row[1] * q2u) & mask
            e = np.minimum(r, (-r) & mask)  # 2**64 == 0 mod 2**B, so this is 2**B - r
            if half is not None:
                tie |= r == half
            err = e if err is None else np.maximum(err, e)
        emin = int(err.min())
        holders = np.flatnonzero(err == emin)
        if len(holders) == 1:
            i = int(holders[0])
            if not tie[i] and (running_min is None or emin < running_min):
                q = (int(q1[i]), int(q2[i]))
                p, errv, unique = nearest_residual(theta, q, norms.norm_m)
                qnorm = norm_eval([Fraction(c) for c in q], norms.norm_n)
                assert unique
                out.append((q, p, errv, qnorm))
        if running_min is None or emin < running_min:
            running_min = emin
        if emin == 0:
            break
    return out


# ---------------------------------------------------------------------------
# Continued fractions and the 1d fast path


def cf_expand(theta: Rational, k_max: Optional[int] = None) -> CFExpansion:
    """Continued fraction of a rational in [0, 1) by the Euclidean algorithm.

    The expansion is canonical (final quotient >= 2 comes out of the
    algorithm automatically); ``k_max`` truncates to that many partial
    quotients after a_0.  Convergents include the index-0 pair (a_0, 1).
    """
    theta = Fraction(theta)
    if not 0 <= theta < 1:
        raise ValueError("cf_expand requires 0 <= theta < 1")
    quotients = [0]
    convergents = [(0, 1)]
    p_prev, q_prev = 1, 0  # index -1
    p_cur, q_cur = 0, 1    # index 0
    num, den = theta.numerator, theta.denominator
    exact = num == 0
    k = 0
    while num != 0:
        if k_max is not None and k >= k_max:
            break
        a, rem = divmod(den, num)
        quotients.append(a)
        p_cur, p_prev = a * p_cur + p_prev, p_cur
        q_cur, q_prev = a * q_cur + q_prev, q_cur
        convergents.append((p_cur, q_cur))
        num, den = rem, num
        k += 1
        if num == 0:
            exact = True
    return CFExpansion(tuple(quotients), tuple(convergents), exact)


def cf_fast_count(theta: Rational,
                  T: Optional[Rational] = None,
                  sign_mode: str = "signed",
                  qmax: Optional[Rational] = None) -> int:
    """Count best approximations of a 1x1 target via its convergents.

    Valid for the absolute-value norm with scale 1 on both sides.  Counts the
    convergents with denominator below the cut-off, including the 0th exactly
    when the fractional part is below 1/2 (at exactly 1/2 the inner minimiser
    at q = 1 is tied and no record exists).  Agreement with the definitional
    enumeration is enforced by the test suite.
    """
    if sign_mode not in ("signed", "unsigned"):
        raise ValueError("sign_mode must be 'signed' or 'unsigned'")
    theta = Fraction(theta)
    frac = theta - (theta.numerator // theta.denominator)
    cutoff = _Cutoff(NormSpec(SUP, 1), T, qmax)

    def admits(qden: int) -> bool:
        return cutoff.admits(NormValue(SUP, Fraction(qden)))

    if frac == 0:
        count = 1 if admits(1) else 0
    else:
        cf = cf_expand(frac)
        count = sum(1 for (_, qd) in cf.convergents[1:] if admits(qd))
        if frac < Fraction(1, 2) and admits(1):
            count += 1
    return 2 * count if sign_mode == "signed" else count


def require_fast_path(m: int, n: int, norms: ProductNormSpec) -> None:
    """Raise if the configuration is outside the validated fast-path domain."""
    if m != 1 or n != 1:
        raise ValueError("fast path requires m = n = 1")
    if norms.norm_m.scale != 1 or norms.norm_n.scale != 1:
        raise ValueError("fast path requires unit norm scales")
