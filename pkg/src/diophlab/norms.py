"""Norms on the two factors, exact norm values, and integer shell enumeration.

Two norm kinds are supported: "sup" and "euclidean", each with a positive
rational scale factor.  Euclidean values are carried as exact *squared*
norms so that every ordering decision stays in rational arithmetic; the
two kinds are never compared with each other.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

SUP = "sup"
EUCLIDEAN = "euclidean"
_KINDS = (SUP, EUCLIDEAN)

Vector = tuple[Fraction, ...]


@dataclass(frozen=True)
class NormSpec:
    """A scaled sup or euclidean norm on Z^dim / Q^dim."""

    kind: str
    dim: int
    scale: Fraction = Fraction(1)

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown norm kind {self.kind!r}")
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        object.__setattr__(self, "scale", Fraction(self.scale))
        if self.scale <= 0:
            raise ValueError("scale must be positive")


@dataclass(frozen=True)
class ProductNormSpec:
    """Norms on the R^m x R^n splitting; the ambient norm is the max of the two."""

    m: int
    n: int
    norm_m: NormSpec
    norm_n: NormSpec

    def __post_init__(self):
        if self.norm_m.dim != self.m or self.norm_n.dim != self.n:
            raise ValueError("component norm dimensions do not match (m, n)")

    @classmethod
    def default(cls, m: int, n: int, kind_m: str = SUP, kind_n: str = SUP,
                scale_m: Fraction = Fraction(1), scale_n: Fraction = Fraction(1)) -> "ProductNormSpec":
        return cls(m, n, NormSpec(kind_m, m, scale_m), NormSpec(kind_n, n, scale_n))


@dataclass(frozen=True)
class NormValue:
    """Exact, totally ordered value of a norm evaluation.

    For kind "sup" ``raw`` is the scaled norm itself; for "euclidean" it is
    the scaled norm squared.  Only values of the same kind compare.
    """

    kind: str
    raw: Fraction

    def _check(self, other: "NormValue") -> None:
        if not isinstance(other, NormValue):
            raise TypeError(f"cannot compare NormValue with {type(other).__name__}")
        if self.kind != other.kind:
            raise ValueError(f"cannot compare {self.kind} value with {other.kind} value")

    def __lt__(self, other):
        self._check(other)
        return self.raw < other.raw

    def __le__(self, other):
        self._check(other)
        return self.raw <= other.raw

    def __gt__(self, other):
        self._check(other)
        return self.raw > other.raw

    def __ge__(self, other):
        self._check(other)
        return self.raw >= other.raw

    def is_zero(self) -> bool:
        return self.raw == 0

    def as_float(self) -> float:
        """The actual norm as a float (square root applied for euclidean)."""
        if self.kind == EUCLIDEAN:
            return math.sqrt(float(self.raw))
        return float(self.raw)


def norm_eval(v: Sequence[Fraction], spec: NormSpec) -> NormValue:
    """Exact norm of a rational vector under ``spec``.

    Sup kind returns scale * max|v_i|; euclidean returns scale^2 * sum(v_i^2),
    i.e. the squared norm, which is order-isomorphic to the norm itself.
    """
    if len(v) != spec.dim:
        raise ValueError(f"vector length {len(v)} does not match norm dim {spec.dim}")
    vf = [Fraction(x) for x in v]
    if spec.kind == SUP:
        return NormValue(SUP, spec.scale * max(abs(x) for x in vf))
    return NormValue(EUCLIDEAN, spec.scale * spec.scale * sum(x * x for x in vf))


def coordinate_range(spec: NormSpec, bound: NormValue) -> int:
    """Largest R such that some integer vector with a coordinate of size R can
    still satisfy norm <= bound; coordinates outside [-R, R] are impossible."""
    if bound.kind != spec.kind:
        raise ValueError("bound kind does not match norm kind")
    if bound.raw < 0:
        raise ValueError("bound must be nonnegative")
    if spec.kind == SUP:
        # scale * |v_i| <= raw
        limit = bound.raw / spec.scale
    else:
        # scale^2 * v_i^2 <= raw
        limit = bound.raw / (spec.scale * spec.scale)
        return math.isqrt(limit.numerator // limit.denominator)
    return limit.numerator // limit.denominator


def enumerate_shells(spec: NormSpec, bound: NormValue) -> list[tuple[NormValue, list[tuple[int, ...]]]]:
    """Group all nonzero integer vectors with norm <= bound by exact norm value.

    Shells are returned in strictly increasing order of NormValue; vectors
    within a shell are in lexicographic order.  The bound is inclusive.
    """
    R = coordinate_range(spec, bound)
    shells: dict[Fraction, list[tuple[int, ...]]] = {}
    for v in itertools.product(range(-R, R + 1), repeat=spec.dim):
        if all(c == 0 for c in v):
            continue
        nv = norm_eval([Fraction(c) for c in v], spec)
        if nv.raw <= bound.raw:
            shells.setdefault(nv.raw, []).append(v)
    out = []
    for raw in sorted(shells):
        out.append((NormValue(spec.kind, raw), sorted(shells[raw])))
    return out


def iter_shells_unbounded(spec: NormSpec) -> Iterable[tuple[NormValue, list[tuple[int, ...]]]]:
    """Yield shells in increasing norm without an a-priori bound.

    Works outward through hypercube rings of sup-size s = 1, 2, ...; for the
    euclidean kind, a shell with squared norm <= s^2 can only contain vectors
    of sup-size <= s, so buffered shells are emitted once they are complete.
    """
    pending: dict[Fraction, list[tuple[int, ...]]] = {}
    s = 0
    while True:
        s += 1
        for v in _sup_ring(spec.dim, s):
            nv = norm_eval([Fraction(c) for c in v], spec)
            pending.setdefault(nv.raw, []).append(v)
        if spec.kind == SUP:
            emit_limit = spec.scale * s
        else:
            emit_limit = spec.scale * spec.scale * s * s
        for raw in sorted(k for k in pending if k <= emit_limit):
            yield NormValue(spec.kind, raw), sorted(pending.pop(raw))


def _sup_ring(dim: int, s: int) -> Iterable[tuple[int, ...]]:
    """All integer vectors with max|v_i| == s exactly, in O(output) time."""
    if dim == 1:
        yield (-s,)
        yield (s,)
        return
    for v0 in (-s, s):
        for rest in itertools.product(range(-s, s + 1), repeat=dim - 1):
            yield (v0,) + rest
    for v0 in range(-s + 1, s):
        for rest in _sup_ring(dim - 1, s):
            yield (v0,) + rest
