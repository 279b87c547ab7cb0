"""Unimodular lattices under the diagonal flow and exact window counts.

A lattice is held as a d x d matrix of high-precision floats whose columns
generate it; the guard parameter P fixes a band tau = 2**(-P/2) around every
threshold comparison.  Working precision is raised automatically along the
flow so that accumulated arithmetic error stays far below tau, and any
comparison landing inside the band makes the affected evaluation
INDETERMINATE instead of guessing.

The central evaluation counts lattice vectors v with ||pi1(v)|| <= 1 and
1 <= ||pi2(v)|| < e whose box {||x|| <= ||pi1(v)||, ||y|| <= ||pi2(v)||}
contains no primitive lattice point besides +-v.  Companion counts over an
epsilon-thickened boundary shell and over near-tied pairs bound how much the
evaluation can move under a small perturbation of the lattice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import mpmath
import numpy as np
from mpmath import mp, mpf

from .bestapprox import TargetMatrix
from .exactexp import cmp_exp
from .norms import SUP, NormSpec, NormValue, ProductNormSpec, norm_eval

Rational = Union[Fraction, int]

_MAX_WORK_BITS = 1 << 14
_LLL_DELTA = 0.99
_LOG2_E = 1.4426950408889634


class CertifiedPrecisionError(RuntimeError):
    """The computation cannot be certified at an admissible working precision."""


class EnumerationBudgetError(RuntimeError):
    """Lattice point enumeration exceeded its node budget."""


class _IndeterminateType:
    """Singleton marker for evaluations blocked by a guard-band comparison."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INDETERMINATE"


INDETERMINATE = _IndeterminateType()


# ---------------------------------------------------------------------------
# Basis, reduction, flow


def _to_mpf(x) -> mpf:
    if isinstance(x, Fraction):
        return mpf(x.numerator) / mpf(x.denominator)
    return mpf(x)


def _gram_schmidt(cols: list[list[mpf]]):
    """Orthogonalisation data (mu, Bsq) of the column vectors."""
    d = len(cols)
    bstar = []
    mu = [[mpf(0)] * d for _ in range(d)]
    Bsq = [mpf(0)] * d
    for i in range(d):
        v = list(cols[i])
        for j in range(i):
            if Bsq[j] == 0:
                raise CertifiedPrecisionError("degenerate basis in orthogonalisation")
            m_ij = mpmath.fdot(cols[i], bstar[j]) / Bsq[j]
            mu[i][j] = m_ij
            v = [v[k] - m_ij * bstar[j][k] for k in range(d)]
        bstar.append(v)
        Bsq[i] = mpmath.fdot(v, v)
        if Bsq[i] <= 0:
            raise CertifiedPrecisionError("orthogonalised norm underflow")
    return mu, Bsq


def _lll_reduce(cols: list[list[mpf]]):
    """LLL-reduce the columns; returns (reduced columns, integer transform U)
    with reduced = original @ U, plus the orthogonalisation of the result."""
    d = len(cols)
    b = [list(c) for c in cols]
    U = [[1 if i == j else 0 for j in range(d)] for i in range(d)]
    mu, Bsq = _gram_schmidt(b)
    k = 1
    swaps = 0
    while k < d:
        for j in range(k - 1, -1, -1):
            r = int(mpmath.nint(mu[k][j]))
            if r != 0:
                b[k] = [b[k][i] - r * b[j][i] for i in range(d)]
                for i in range(d):
                    U[i][k] -= r * U[i][j]
                mu, Bsq = _gram_schmidt(b)
        if Bsq[k] >= (_LLL_DELTA - mu[k][k - 1] ** 2) * Bsq[k - 1]:
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            for i in range(d):
                U[i][k], U[i][k - 1] = U[i][k - 1], U[i][k]
            mu, Bsq = _gram_schmidt(b)
            k = max(k - 1, 1)
            swaps += 1
            if swaps > 4096:
                raise CertifiedPrecisionError("basis reduction did not terminate")
    return b, U, mu, Bsq


class LatticeBasis:
    """Immutable lattice with a reduction cache; columns generate the lattice."""

    def __init__(self, rows: Sequence[Sequence], m: int, n: int,
                 norms: Optional[ProductNormSpec] = None,
                 precision: int = 128,
                 origin: Optional[tuple[TargetMatrix, Fraction]] = None,
                 work_bits: Optional[int] = None):
        self.m = m
        self.n = n
        self.d = m + n
        if len(rows) != self.d or any(len(r) != self.d for r in rows):
            raise ValueError("basis must be a (m+n) x (m+n) matrix")
        self.norms = norms if norms is not None else ProductNormSpec.default(m, n)
        self.precision = precision
        self.work_bits = work_bits if work_bits is not None else precision + 32
        if self.work_bits > _MAX_WORK_BITS:
            raise CertifiedPrecisionError(f"working precision {self.work_bits} exceeds cap")
        self.origin = origin
        with mp.workprec(self.work_bits):
            self.rows = tuple(tuple(_to_mpf(x) for x in r) for r in rows)
            cols = [[self.rows[i][j] for i in range(self.d)] for j in range(self.d)]
            red, U, mu, Bsq = _lll_reduce(cols)
            self._red_cols = red
            self._transform = U
            self._mu = mu
            self._Bsq = Bsq
            absdet = mpf(1)
            for s in Bsq:
                absdet *= mpmath.sqrt(s)
            self.abs_det = absdet
            if abs(absdet - 1) > self.tau:
                raise CertifiedPrecisionError(
                    f"covolume {mpmath.nstr(absdet, 20)} not certified unimodular")

    @property
    def tau(self) -> mpf:
        return mpf(2) ** (-(self.precision // 2))

    @property
    def origin_tag(self):
        if self.origin is None:
            return None
        theta, t = self.origin
        return (theta.key(), t)

    def embed(self, coeffs_reduced: Sequence[int]) -> list[mpf]:
        """Embedding of the point with the given reduced-basis coefficients."""
        return [mpmath.fsum(self._red_cols[j][i] * coeffs_reduced[j] for j in range(self.d))
                for i in range(self.d)]

    def original_coeffs(self, coeffs_reduced: Sequence[int]) -> tuple[int, ...]:
        U = self._transform
        return tuple(sum(U[i][j] * coeffs_reduced[j] for j in range(self.d))
                     for i in range(self.d))

    def exact_block_norms(self, coeffs: Sequence[int]) -> Optional[tuple[NormValue, NormValue]]:
        """Exact unflowed projection norms of a point, when the basis carries
        its generating target.

        The point with original coefficients (p, q) embeds as
        (e^(nt/m) (p + theta q), e^(-t) q); the returned values are the exact
        norms of p + theta q and of q, against which same-flow-time points
        compare directly (the flow factors cancel).
        """
        if self.origin is None:
            return None
        theta, _ = self.origin
        p, q = coeffs[:self.m], coeffs[self.m:]
        x = theta.apply(q)
        resid = [p[i] + x[i] for i in range(self.m)]
        return (norm_eval(resid, self.norms.norm_m),
                norm_eval([Fraction(c) for c in q], self.norms.norm_n))


def _flow_work_bits(m: int, n: int, t: Fraction, precision: int) -> int:
    skew = abs(float(t)) * (m + n) / m * _LOG2_E
    return max(precision + 32, int(math.ceil(skew)) + precision // 2 + 64)


def _flowed_unipotent(theta: TargetMatrix, t: Fraction,
                      norms: Optional[ProductNormSpec], precision: int) -> LatticeBasis:
    m, n = theta.m, theta.n
    wb = _flow_work_bits(m, n, t, precision)
    if wb > _MAX_WORK_BITS:
        raise CertifiedPrecisionError(f"flow time {t} needs {wb} working bits, above cap")
    with mp.workprec(wb):
        a = mpmath.exp(_to_mpf(Fraction(n, m) * t))
        c = mpmath.exp(_to_mpf(-t))
        rows = []
        for i in range(m):
            row = [a if j == i else mpf(0) for j in range(m)]
            row += [a * _to_mpf(theta.entries[i][j]) for j in range(n)]
            rows.append(row)
        for i in range(n):
            rows.append([mpf(0)] * m + [c if j == i else mpf(0) for j in range(n)])
    return LatticeBasis(rows, m, n, norms, precision, origin=(theta, t), work_bits=wb)


def make_unipotent(theta: TargetMatrix,
                   norms: Optional[ProductNormSpec] = None,
                   precision: int = 128) -> LatticeBasis:
    """The lattice with identity blocks and theta in the upper-right corner."""
    return _flowed_unipotent(theta, Fraction(0), norms, precision)


def apply_flow(L: LatticeBasis, t: Rational) -> LatticeBasis:
    """Left-multiply by diag(e^(nt/m) I_m, e^(-t) I_n).

    Bases produced from a target matrix are rebuilt from the exact data at
    the accumulated flow time, so repeated flows do not accumulate rounding;
    other bases are scaled row-wise at a precision adequate for |t|.
    """
    t = Fraction(t)
    if L.origin is not None:
        theta, t0 = L.origin
        return _flowed_unipotent(theta, t0 + t, L.norms, L.precision)
    wb = max(L.work_bits, _flow_work_bits(L.m, L.n, t, L.precision))
    if wb > _MAX_WORK_BITS:
        raise CertifiedPrecisionError(f"flow time {t} needs {wb} working bits, above cap")
    with mp.workprec(wb):
        a = mpmath.exp(_to_mpf(Fraction(L.n, L.m) * t))
        c = mpmath.exp(_to_mpf(-t))
        rows = [[(a if i < L.m else c) * x for x in L.rows[i]] for i in range(L.d)]
    return LatticeBasis(rows, L.m, L.n, L.norms, L.precision, origin=None, work_bits=wb)


def transform_lattice(L: LatticeBasis, g: Sequence[Sequence],
                      renormalize: bool = False) -> LatticeBasis:
    """The lattice g . Lambda for a matrix g in SL_d.

    With ``renormalize`` the matrix is divided by det(g)^(1/d) at working
    precision first, absorbing the float-level determinant error of g
    matrices sampled in double precision.
    """
    with mp.workprec(L.work_bits):
        gm = [[_to_mpf(x) for x in row] for row in g]
        if renormalize:
            det = mpmath.det(mpmath.matrix(gm))
            scale = mpmath.root(abs(det), L.d)
            gm = [[x / scale for x in row] for row in gm]
        rows = [[mpmath.fsum(gm[i][k] * L.rows[k][j] for k in range(L.d))
                 for j in range(L.d)] for i in range(L.d)]
    return LatticeBasis(rows, L.m, L.n, L.norms, L.precision, origin=None,
                        work_bits=L.work_bits)


# ---------------------------------------------------------------------------
# Point enumeration


@dataclass(frozen=True)
class BoxSpec:
    """Product box {||pi1|| <= r1} x {||pi2|| <= r2}."""

    r1: float
    r2: float
    norms: ProductNormSpec

    def __post_init__(self):
        if float(self.r1) < 0 or float(self.r2) < 0:
            raise ValueError("box radii must be nonnegative")


@dataclass(frozen=True)
class LatticePoint:
    coeffs: tuple[int, ...]
    embedding: tuple
    primitive: bool

    def negated_of(self, other: "LatticePoint") -> bool:
        return all(a == -b for a, b in zip(self.coeffs, other.coeffs))


def _block_norm(vec, spec: NormSpec) -> mpf:
    scale = _to_mpf(spec.scale)
    if spec.kind == SUP:
        return scale * max(abs(x) for x in vec)
    return scale * mpmath.sqrt(mpmath.fdot(vec, vec))


def _euclid_radius_sq(r: mpf, spec: NormSpec) -> mpf:
    """Squared euclidean radius enclosing the ball of norm <= r under spec."""
    base = r / _to_mpf(spec.scale)
    if spec.kind == SUP:
        return spec.dim * base * base
    return base * base


def _enumerate_ball(L: LatticeBasis, R2: mpf, budget: int):
    """Nonzero coefficient vectors (reduced basis) of squared length <= R2,
    with outward slack so no boundary point is missed."""
    d = L.d
    mu, Bsq = L._mu, L._Bsq
    pad = mpf(2) ** (-24)
    limit = R2 * (1 + pad)
    out = []
    coeff = [0] * d
    nodes = 0

    def rec(i: int, remaining: mpf):
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise EnumerationBudgetError(
                f"enumeration exceeded {budget} nodes (d={d}, R2={mpmath.nstr(R2, 8)})")
        center = mpmath.fsum(mu[j][i] * coeff[j] for j in range(i + 1, d))
        halfwidth = mpmath.sqrt(remaining / Bsq[i]) if remaining > 0 else mpf(0)
        lo = int(mpmath.ceil(-center - halfwidth - pad))
        hi = int(mpmath.floor(-center + halfwidth + pad))
        for c in range(lo, hi + 1):
            coeff[i] = c
            used = (c + center) ** 2 * Bsq[i]
            rest = remaining - used
            if rest < -limit * pad:
                continue
            if i == 0:
                if any(coeff):
                    out.append(tuple(coeff))
            else:
                rec(i - 1, rest)
        coeff[i] = 0

    with mp.workprec(L.work_bits):
        rec(d - 1, limit)
    return out


def points_in_box(L: LatticeBasis, box: BoxSpec, primitive_only: bool = False,
                  budget: int = 2_000_000) -> list[LatticePoint]:
    """Every nonzero lattice point v with ||pi1(v)|| <= r1 + tau and
    ||pi2(v)|| <= r2 + tau, exhaustively.

    Coefficient ranges come from orthogonalised lower bounds against the
    euclidean ball enclosing the box; candidates are then filtered by the
    guarded box membership test.  Points come back sorted by original-basis
    coefficients, so the output is deterministic.
    """
    with mp.workprec(L.work_bits):
        tau = L.tau
        r1 = _to_mpf(box.r1) + 2 * tau
        r2 = _to_mpf(box.r2) + 2 * tau
        R2 = _euclid_radius_sq(r1, box.norms.norm_m) + _euclid_radius_sq(r2, box.norms.norm_n)
        raw = _enumerate_ball(L, R2, budget)
        pts = []
        for cr in raw:
            emb = L.embed(cr)
            s1 = _block_norm(emb[:L.m], box.norms.norm_m)
            s2 = _block_norm(emb[L.m:], box.norms.norm_n)
            if s1 > _to_mpf(box.r1) + tau or s2 > _to_mpf(box.r2) + tau:
                continue
            orig = L.original_coeffs(cr)
            prim = math.gcd(*orig) == 1
            if primitive_only and not prim:
                continue
            pts.append(LatticePoint(orig, tuple(emb), prim))
        pts.sort(key=lambda p: p.coeffs)
    return pts


# ---------------------------------------------------------------------------
# The window count and its companions


@dataclass
class WindowCountResult:
    value: object  # nonnegative int, or INDETERMINATE
    witnesses: list[LatticePoint]
    margin: float

    @property
    def conclusive(self) -> bool:
        return self.value is not INDETERMINATE


def _norm_pair(L: LatticeBasis, pt: LatticePoint) -> tuple[mpf, mpf]:
    return (_block_norm(pt.embedding[:L.m], L.norms.norm_m),
            _block_norm(pt.embedding[L.m:], L.norms.norm_n))


_SAT, _VIOL, _BORDER = range(3)


class _GuardedComparisons:
    """Guard-band comparisons with exact adjudication of band hits.

    Float slacks outside the band decide immediately.  A slack inside the
    band is a potential tie; when the lattice carries its generating target,
    the comparison is settled exactly (inter-point norms compare as rationals
    with the flow factors cancelling, window thresholds via certified
    enclosures of the flow scales).  Without exact data a band hit stays
    open, except that a bit-exact zero slack is taken as a true boundary hit
    and resolved by the closed/strict orientation of the inequality.
    """

    def __init__(self, L: LatticeBasis, e_val: mpf):
        self.L = L
        self.tau = L.tau
        self.e_val = e_val
        self.tagged = L.origin is not None
        if self.tagged:
            theta, t = L.origin
            self.t = t
            self.alpha = Fraction(L.n, L.m) * t  # x-side flow exponent
            self.double = L.norms.norm_n.kind != SUP
            self.double_m = L.norms.norm_m.kind != SUP
        self._exact: dict[tuple[int, ...], tuple[NormValue, NormValue]] = {}

    def exact_norms(self, pt: LatticePoint) -> tuple[NormValue, NormValue]:
        if pt.coeffs not in self._exact:
            self._exact[pt.coeffs] = self.L.exact_block_norms(pt.coeffs)
        return self._exact[pt.coeffs]

    @staticmethod
    def _state(slack, tau) -> int:
        if slack > tau:
            return _SAT
        if slack < -tau:
            return _VIOL
        return _BORDER

    def window(self, pt: LatticePoint, s1: mpf, s2: mpf):
        """Window membership: ||pi1|| <= 1, 1 <= ||pi2|| < e.

        Returns (verdict, margin_slack, border_slack): verdict in
        {'in', 'out', None}; margin_slack is the smallest float slack the
        verdict relies on (None when decided exactly); border_slack is the
        offending slack when no verdict is reached.
        """
        slacks = (1 - s1, s2 - 1, self.e_val - s2)
        closed = (True, True, False)
        states = [self._state(s, self.tau) for s in slacks]
        if _VIOL in states:
            return "out", max(-s for s, st in zip(slacks, states) if st == _VIOL), None
        if _BORDER not in states:
            return "in", min(slacks), None
        if self.tagged:
            ok = self._window_exact(pt)
            proper = [s for s, st in zip(slacks, states) if st == _SAT]
            return ("in" if ok else "out"), (min(proper) if proper else None), None
        for s, cl in zip(slacks, closed):
            if s == 0 and not cl:
                return "out", None, None
        if all(s == 0 or st == _SAT for s, st in zip(slacks, states)):
            proper = [s for s, st in zip(slacks, states) if st == _SAT and s != 0]
            return "in", (min(proper) if proper else None), None
        return None, None, min(abs(s) for s, st in zip(slacks, states) if st == _BORDER)

    def _window_exact(self, pt: LatticePoint) -> bool:
        nv1, nv2 = self.exact_norms(pt)
        k1 = 2 if self.double_m else 1
        k2 = 2 if self.double else 1
        return (cmp_exp(nv1.raw, -k1 * self.alpha) <= 0
                and cmp_exp(nv2.raw, k2 * self.t) >= 0
                and cmp_exp(nv2.raw, k2 * (self.t + 1)) < 0)

    def box_member(self, v: LatticePoint, v1: mpf, v2: mpf,
                   w: LatticePoint, w1: mpf, w2: mpf):
        """Is w in the box of v (both projections <=, closed)?

        Returns (verdict, slack): verdict in {True, False, None}; slack is
        the float margin relied on (None when decided exactly or open).
        """
        d1, d2 = v1 - w1, v2 - w2
        st1, st2 = self._state(d1, self.tau), self._state(d2, self.tau)
        if st1 == _VIOL or st2 == _VIOL:
            return False, max(-d1, -d2)
        if st1 == _SAT and st2 == _SAT:
            return True, min(d1, d2)
        if self.tagged:
            nv_v = self.exact_norms(v)
            nv_w = self.exact_norms(w)
            ok = nv_w[0].raw <= nv_v[0].raw and nv_w[1].raw <= nv_v[1].raw
            proper = [d for d, st in ((d1, st1), (d2, st2)) if st == _SAT]
            return ok, (min(proper) if ok and proper else None)
        if all(d == 0 or st == _SAT for d, st in ((d1, st1), (d2, st2))):
            proper = [d for d, st in ((d1, st1), (d2, st2)) if st == _SAT and d != 0]
            return True, (min(proper) if proper else None)
        return None, min(abs(d) for d, st in ((d1, st1), (d2, st2)) if st == _BORDER)


def window_count(L: LatticeBasis, budget: int = 2_000_000) -> WindowCountResult:
    """Count v with ||pi1(v)|| <= 1, 1 <= ||pi2(v)|| < e and no primitive
    lattice point besides +-v in its box.

    A non-primitive candidate is rejected outright (its primitive scaled-down
    copy lies in its box).  Comparisons landing inside the guard band are
    adjudicated exactly when the basis carries its generating target; a band
    hit that stays open leaves the candidate unresolved unless a clear
    competitor settles it, and any unresolved candidate makes the whole
    evaluation INDETERMINATE with the offending margin reported.
    """
    with mp.workprec(L.work_bits):
        e_val = mpmath.exp(1)
        cmps = _GuardedComparisons(L, e_val)
        box = BoxSpec(1.0, float(e_val) + 1e-12, L.norms)
        pts = points_in_box(L, box, primitive_only=False, budget=budget)
        norms_cache = [_norm_pair(L, p) for p in pts]
        prims = [(p, pair) for p, pair in zip(pts, norms_cache) if p.primitive]

        count = 0
        witnesses = []
        decisive = []   # slacks the final value relies on
        offending = []  # sub-tau slacks blocking a resolution

        for p, (s1, s2) in zip(pts, norms_cache):
            verdict, margin_slack, border = cmps.window(p, s1, s2)
            if verdict == "out":
                if margin_slack is not None:
                    decisive.append(margin_slack)
                continue
            if not p.primitive:
                continue  # exact rejection, no float comparison involved

            killed = False
            kill_slack = None
            unresolved = []
            exclusions = []
            for w, (w1, w2) in prims:
                if w.coeffs == p.coeffs or w.negated_of(p):
                    continue
                member, slack = cmps.box_member(p, s1, s2, w, w1, w2)
                if member is True:
                    killed = True
                    if slack is not None and (kill_slack is None or slack > kill_slack):
                        kill_slack = slack
                elif member is False:
                    if slack is not None:
                        exclusions.append(slack)
                else:
                    unresolved.append(slack)

            if killed:
                if kill_slack is not None:
                    decisive.append(kill_slack)
            elif verdict is None:
                offending.append(border)
            elif unresolved:
                offending.append(min(unresolved))
            else:
                count += 1
                witnesses.append(p)
                if margin_slack is not None:
                    decisive.append(margin_slack)
                if exclusions:
                    decisive.append(min(exclusions))

        if offending:
            return WindowCountResult(INDETERMINATE, [], float(min(offending)))
        margin = float(min(decisive)) if decisive else math.inf
        return WindowCountResult(count, witnesses, margin)


def boundary_shell_count(L: LatticeBasis, eps: float, budget: int = 2_000_000) -> int:
    """Primitive points in the eps-thickened boundary shell of the window.

    Counts w in {||x|| <= 1+eps, 1-eps <= ||y|| <= e+eps} minus the open core
    {||x|| < 1-eps, 1+eps < ||y|| < e-eps}; guard-band comparisons resolve
    toward inclusion, so the count is an upper bound.
    """
    if not 0 < eps < 0.25:
        raise ValueError("eps must be in (0, 1/4)")
    with mp.workprec(L.work_bits):
        tau = L.tau
        e_val = mpmath.exp(1)
        eps_m = _to_mpf(eps)
        box = BoxSpec(float(1 + eps_m) + 1e-12, float(e_val + eps_m) + 1e-12, L.norms)
        pts = points_in_box(L, box, primitive_only=True, budget=budget)
        count = 0
        for p in pts:
            s1, s2 = _norm_pair(L, p)
            in_band = (s1 <= 1 + eps_m + tau and s2 >= 1 - eps_m - tau
                       and s2 <= e_val + eps_m + tau)
            in_core = (s1 < 1 - eps_m - tau and s2 > 1 + eps_m + tau
                       and s2 < e_val - eps_m - tau)
            if in_band and not in_core:
                count += 1
    return count


def pair_proximity_count(L: LatticeBasis, eps: float, budget: int = 2_000_000) -> int:
    """Ordered pairs of distinct-up-to-sign primitive points in the enlarged
    window whose first or second projection norms differ by at most eps.

    Guard-band comparisons resolve toward inclusion (upper bound).
    """
    if not 0 < eps < 0.25:
        raise ValueError("eps must be in (0, 1/4)")
    with mp.workprec(L.work_bits):
        tau = L.tau
        e_val = mpmath.exp(1)
        eps_m = _to_mpf(eps)
        box = BoxSpec(float(1 + eps_m) + 1e-12, float(e_val + eps_m) + 1e-12, L.norms)
        pts = points_in_box(L, box, primitive_only=True, budget=budget)
        members = []
        for p in pts:
            s1, s2 = _norm_pair(L, p)
            if s1 <= 1 + eps_m + tau and s2 <= e_val + eps_m + tau:
                members.append((p, s1, s2))
        count = 0
        for i, (v, v1, v2) in enumerate(members):
            for j, (w, w1, w2) in enumerate(members):
                if i == j or v.negated_of(w):
                    continue
                if abs(v1 - w1) <= eps_m + tau or abs(v2 - w2) <= eps_m + tau:
                    count += 1
    return count


# ---------------------------------------------------------------------------
# Perturbation experiment


@dataclass
class PerturbationReport:
    holds: Optional[bool]  # None when either evaluation is indeterminate
    lhs: Optional[int]
    rhs: int
    f_base: WindowCountResult
    f_perturbed: WindowCountResult


def operator_distance_from_identity(g: Sequence[Sequence[float]]) -> float:
    """Spectral norm of g - I (double precision is ample at these scales)."""
    arr = np.array([[float(x) for x in row] for row in g], dtype=float)
    return float(np.linalg.norm(arr - np.eye(arr.shape[0]), 2))


def random_sl_perturbation(d: int, eps: float, rng) -> list[list[float]]:
    """A matrix with unit determinant at operator distance <= eps from the
    identity, sampled from a scaled Gaussian direction."""
    for _ in range(64):
        E = np.array([[rng.gauss(0, 1) for _ in range(d)] for _ in range(d)])
        E *= 0.95 * eps / np.linalg.norm(E, 2)
        g = np.eye(d) + E
        g /= np.linalg.det(g) ** (1.0 / d)
        if np.linalg.norm(g - np.eye(d), 2) <= eps:
            return g.tolist()
    raise RuntimeError("could not sample a unimodular perturbation at this eps")


def perturbation_check(L: LatticeBasis, g: Sequence[Sequence[float]],
                       eps: float, C: float) -> PerturbationReport:
    """Test |f(g Lambda) - f(Lambda)| against the boundary-shell count plus
    the near-tie pair count, both at enlarged width C * eps."""
    if C <= 0:
        raise ValueError("C must be positive")
    dist = operator_distance_from_identity(g)
    if dist > eps * (1 + 1e-9):
        raise ValueError(f"g at operator distance {dist} exceeds eps={eps}")
    f1 = window_count(L)
    f2 = window_count(transform_lattice(L, g, renormalize=True))
    width = float(C) * float(eps)
    rhs = boundary_shell_count(L, width) + pair_proximity_count(L, width)
    if not (f1.conclusive and f2.conclusive):
        return PerturbationReport(None, None, rhs, f1, f2)
    lhs = abs(f2.value - f1.value)
    return PerturbationReport(lhs <= rhs, lhs, rhs, f1, f2)
