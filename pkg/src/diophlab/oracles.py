"""Literal brute-force reference implementations.

These deliberately re-derive results straight from definitions with no
shared shortcuts: the best-approximation oracle scans an explicit window of
numerator vectors for every denominator vector in range and then tests the
defining competitor condition pair by pair.  For dyadic targets the same
literal scan runs on integer numerators over the common denominator, which
keeps the full-range cross-check affordable; the rational path stays as the
general fallback.  Used to cross-check the production enumeration.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Optional

from .bestapprox import TargetMatrix
from .norms import SUP, ProductNormSpec, norm_eval


def _lex_positive(q: tuple[int, ...]) -> bool:
    for c in q:
        if c != 0:
            return c > 0
    return False


def _common_power_of_two(theta: TargetMatrix) -> Optional[int]:
    b = 0
    for row in theta.entries:
        for x in row:
            d = x.denominator
            if d & (d - 1):
                return None
            b = max(b, d.bit_length() - 1)
    return b


def _q_radius(qmax: Fraction, norms: ProductNormSpec) -> int:
    if norms.norm_n.kind == SUP:
        lim = qmax / norms.norm_n.scale
        return lim.numerator // lim.denominator
    lim = (qmax / norms.norm_n.scale) ** 2
    return math.isqrt(lim.numerator // lim.denominator)


def _q_within(q, qmax: Fraction, norms: ProductNormSpec) -> bool:
    qn = norm_eval([Fraction(c) for c in q], norms.norm_n)
    bound = qmax if norms.norm_n.kind == SUP else qmax * qmax
    return qn.raw <= bound


def _qkey(q, norms: ProductNormSpec):
    """Exact denominator-norm sort key (scale is a common positive factor)."""
    if norms.norm_n.kind == SUP:
        return max(abs(c) for c in q)
    return sum(c * c for c in q)


def _scan_window_int(numerators, den_scale: int, q, kind: str):
    """Literal minimisation of ||p + theta q|| on integer numerators.

    theta q has numerator x_i = sum_j n_ij q_j over the common denominator;
    the window floor(-x_i/den) - 2 .. + 2 provably contains every minimising
    coordinate, and all combinations are evaluated.
    """
    x = [sum(row[j] * q[j] for j in range(len(q))) for row in numerators]
    windows = []
    for xi in x:
        lo = -(xi // den_scale) - 2
        windows.append(range(lo, lo + 5))
    best = None
    best_p = None
    ties = 0
    for p in itertools.product(*windows):
        if kind == SUP:
            val = max(abs(p[i] * den_scale + x[i]) for i in range(len(x)))
        else:
            val = sum((p[i] * den_scale + x[i]) ** 2 for i in range(len(x)))
        if best is None or val < best:
            best, best_p, ties = val, p, 1
        elif val == best:
            ties += 1
    return best_p, best, ties


def _scan_window_fraction(theta: TargetMatrix, q, norms: ProductNormSpec):
    x = theta.apply(q)
    windows = []
    for xi in x:
        lo = -(xi.numerator // xi.denominator) - 2
        windows.append(range(lo, lo + 5))
    best = None
    best_p = None
    ties = 0
    for p in itertools.product(*windows):
        val = norm_eval([p[i] + x[i] for i in range(theta.m)], norms.norm_m).raw
        if best is None or val < best:
            best, best_p, ties = val, p, 1
        elif val == best:
            ties += 1
    return best_p, best, ties


def definitional_best_approximations(theta: TargetMatrix, qmax: Fraction,
                                     norms: Optional[ProductNormSpec] = None,
                                     sign_mode: str = "signed"
                                     ) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Every (p, q) with ||q|| <= qmax admitting no competitor, by definition.

    A pair survives exactly when no (p', q') outside {+-(p, q)} has both
    ||p' + theta q'|| <= ||p + theta q|| and ||q'|| <= ||q||.  The competitor
    test scans denominator vectors in ascending norm (for early kills); only
    the lexicographically positive member of each +-q pair is reported, plus
    its mirror in signed mode.
    """
    if norms is None:
        norms = ProductNormSpec.default(theta.m, theta.n)
    qmax = Fraction(qmax)
    radius = _q_radius(qmax, norms)

    bits = _common_power_of_two(theta)
    if bits is not None:
        den_scale = 1 << bits
        numerators = [[x.numerator * (den_scale // x.denominator) for x in row]
                      for row in theta.entries]
        scan = lambda q: _scan_window_int(numerators, den_scale, q, norms.norm_m.kind)  # noqa: E731
    else:
        scan = lambda q: _scan_window_fraction(theta, q, norms)  # noqa: E731

    entries = []
    for q in itertools.product(range(-radius, radius + 1), repeat=theta.n):
        if not any(q) or not _q_within(q, qmax, norms):
            continue
        p, err, ties = scan(q)
        entries.append((q, p, err, ties, _qkey(q, norms)))
    entries.sort(key=lambda e: (e[4], e[0]))

    survivors = []
    for q, p, err, ties, qk in entries:
        if not _lex_positive(q):
            continue
        if ties > 1:
            continue  # another p at the same error defeats (p, q)
        ok = True
        neg_q = tuple(-c for c in q)
        for q2, p2, err2, _, qk2 in entries:
            if qk2 > qk:
                break  # ascending norm: no later competitors possible
            if q2 == q or q2 == neg_q:
                continue
            if err2 <= err:
                ok = False
                break
        if ok:
            survivors.append((p, q))

    if sign_mode == "signed":
        signed = []
        for p, q in survivors:
            signed.append((p, q))
            signed.append((tuple(-c for c in p), tuple(-c for c in q)))
        return sorted(signed)
    return sorted(survivors)
