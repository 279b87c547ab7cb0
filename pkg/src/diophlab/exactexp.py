"""Certified rational enclosures of e**t and exact threshold decisions.

Every comparison of an exact rational against a power of e in this package
goes through here.  Enclosures are plain Fraction intervals [lo, hi] with
lo <= e**t <= hi, produced by a Taylor sum with an explicit remainder bound,
so a comparison is decided only when the rational sits strictly outside the
interval.  For rational t != 0 the number e**t is irrational, hence every
comparison terminates after finitely many refinements.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

Rational = Union[Fraction, int]

_MAX_PREC = 1 << 14


def _round_interval(lo: Fraction, hi: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    """Round an interval outward onto the grid of denominator 2**bits."""
    scale = 1 << bits
    lo_n = (lo.numerator * scale) // lo.denominator
    hi_n = -((-hi.numerator * scale) // hi.denominator)
    return Fraction(lo_n, scale), Fraction(hi_n, scale)


def exp_enclosure(t: Rational, prec: int = 64) -> tuple[Fraction, Fraction]:
    """Return rationals lo <= e**t <= hi with hi - lo <= 2**-prec * lo.

    Uses e**t = (e**(t/2**s))**(2**s) with |t|/2**s <= 1/2; the small
    exponent is summed by Taylor series with the tail bounded by twice the
    first omitted term, and the interval is squared s times.  Each squaring
    at most doubles the relative width, which the initial width budget
    accounts for.
    """
    t = Fraction(t)
    if t == 0:
        return Fraction(1), Fraction(1)
    neg = t < 0
    if neg:
        t = -t

    s = 0
    while t > Fraction(1, 2):
        t /= 2
        s += 1

    work_bits = prec + s + 8
    # Partial Taylor sum; remainder after term n is < 2 * t^(n+1)/(n+1)! for t <= 1/2.
    total = Fraction(1)
    term = Fraction(1)
    n = 0
    tail_budget = Fraction(1, 1 << (work_bits + 2))
    while True:
        n += 1
        term *= Fraction(t.numerator, t.denominator * n)
        total += term
        tail = 2 * term * t / (n + 1)
        if tail < tail_budget:
            break
    lo, hi = _round_interval(total, total + tail, work_bits)

    for _ in range(s):
        lo, hi = lo * lo, hi * hi
        lo, hi = _round_interval(lo, hi, work_bits)

    if neg:
        lo, hi = 1 / hi, 1 / lo
    return lo, hi


def cmp_exp(x: Rational, t: Rational) -> int:
    """Compare the exact rational x with e**t; returns -1, 0 or +1.

    The result 0 is only possible for t == 0 (where e**t == 1 exactly);
    otherwise the enclosure is tightened until it excludes x.
    """
    x = Fraction(x)
    t = Fraction(t)
    if t == 0:
        return (x > 1) - (x < 1)
    if x <= 0:
        return -1
    prec = 32
    while prec <= _MAX_PREC:
        lo, hi = exp_enclosure(t, prec)
        if x < lo:
            return -1
        if x > hi:
            return 1
        prec *= 2
    raise RuntimeError(f"comparison of {x} with e**{t} did not resolve at {_MAX_PREC} bits")


def leq_exp(x: Rational, t: Rational) -> bool:
    """Decide x <= e**t exactly."""
    return cmp_exp(x, t) <= 0


def floor_log(x: Rational) -> int:
    """Return the integer M with e**M <= x < e**(M+1), for rational x > 0."""
    x = Fraction(x)
    if x <= 0:
        raise ValueError("floor_log requires x > 0")
    # Coarse guess from bit lengths: log(x) = log2(x) * log 2.
    bits = x.numerator.bit_length() - x.denominator.bit_length()
    guess = int(bits * 0.6931471805599453)
    m = guess
    while cmp_exp(x, m) < 0:  # x < e**m
        m -= 1
    while cmp_exp(x, m + 1) >= 0:  # x >= e**(m+1)
        m += 1
    return m


class ExpThreshold:
    """The value e**T for a fixed rational T, usable as an exact cut-off.

    ``admits(x)`` decides x <= e**T; ``rational_upper()`` gives a rational
    upper bound for sizing enumeration ranges.
    """

    def __init__(self, T: Rational):
        self.T = Fraction(T)
        self._cache: dict[int, tuple[Fraction, Fraction]] = {}

    def _enclosure(self, prec: int) -> tuple[Fraction, Fraction]:
        if prec not in self._cache:
            self._cache[prec] = exp_enclosure(self.T, prec)
        return self._cache[prec]

    def admits(self, x: Rational) -> bool:
        x = Fraction(x)
        if self.T == 0:
            return x <= 1
        if x <= 0:
            return True
        prec = 32
        while prec <= _MAX_PREC:
            lo, hi = self._enclosure(prec)
            if x < lo:
                return True
            if x > hi:
                return False
            prec *= 2
        raise RuntimeError(f"threshold comparison of {x} with e**{self.T} did not resolve")

    def rational_upper(self) -> Fraction:
        return self._enclosure(32)[1]

    def __repr__(self) -> str:
        return f"ExpThreshold(e**{self.T})"
