import itertools
import random
from fractions import Fraction as F

import pytest

from diophlab.norms import (EUCLIDEAN, SUP, NormSpec, NormValue, ProductNormSpec,
                            enumerate_shells, iter_shells_unbounded, norm_eval)


def brute_force_ball(spec, bound_raw, radius):
    """Direct grid scan oracle: all nonzero vectors with norm value <= bound."""
    out = []
    for v in itertools.product(range(-radius, radius + 1), repeat=spec.dim):
        if any(v) and norm_eval([F(c) for c in v], spec).raw <= bound_raw:
            out.append(v)
    return sorted(out)


def test_norm_eval_examples():
    assert norm_eval([F(3), F(-4)], NormSpec(SUP, 2)).raw == 4
    assert norm_eval([F(3), F(-4)], NormSpec(EUCLIDEAN, 2)).raw == 25
    assert norm_eval([F(1, 2)], NormSpec(SUP, 1, F(2))).raw == 1


def test_norm_eval_dimension_mismatch():
    with pytest.raises(ValueError):
        norm_eval([F(1)], NormSpec(SUP, 2))


def test_norm_value_kind_isolation():
    a = norm_eval([F(1)], NormSpec(SUP, 1))
    b = norm_eval([F(1)], NormSpec(EUCLIDEAN, 1))
    with pytest.raises(ValueError):
        _ = a < b


def test_shells_dim1_sup():
    shells = enumerate_shells(NormSpec(SUP, 1), NormValue(SUP, F(2)))
    assert [(s.raw, vs) for s, vs in shells] == [(1, [(-1,), (1,)]), (2, [(-2,), (2,)])]


def test_shells_dim2_euclidean_radius2():
    shells = enumerate_shells(NormSpec(EUCLIDEAN, 2), NormValue(EUCLIDEAN, F(4)))
    assert [(s.raw, len(vs)) for s, vs in shells] == [(1, 4), (2, 4), (4, 4)]
    got = sorted(v for _, vs in shells for v in vs)
    assert got == brute_force_ball(NormSpec(EUCLIDEAN, 2), F(4), 2)


def test_shells_dim2_sup_unit():
    shells = enumerate_shells(NormSpec(SUP, 2), NormValue(SUP, F(1)))
    assert len(shells) == 1 and len(shells[0][1]) == 8


def test_shell_completeness_random():
    rng = random.Random(2024)
    for _ in range(12):
        dim = rng.randint(1, 3)
        kind = rng.choice([SUP, EUCLIDEAN])
        bound = rng.randint(1, 20 if dim < 3 else 8)
        spec = NormSpec(kind, dim)
        raw = F(bound) if kind == SUP else F(bound * bound)
        shells = enumerate_shells(spec, NormValue(kind, raw))
        got = sorted(v for _, vs in shells for v in vs)
        assert got == brute_force_ball(spec, raw, bound)
        # strictly increasing shell keys
        keys = [s.raw for s, _ in shells]
        assert keys == sorted(set(keys))


def test_shell_symmetry_and_scale_invariance():
    specs = [NormSpec(SUP, 2, scale) for scale in (F(1), F(3, 2), F(2))]
    groupings = []
    for spec in specs:
        shells = enumerate_shells(spec, NormValue(SUP, spec.scale * 3))
        for _, vs in shells:
            vset = set(vs)
            assert all(tuple(-c for c in v) in vset for v in vs)
        groupings.append([vs for _, vs in shells])
    assert groupings[0] == groupings[1] == groupings[2]


def test_unbounded_iterator_matches_bounded():
    spec = NormSpec(EUCLIDEAN, 2)
    bounded = enumerate_shells(spec, NormValue(EUCLIDEAN, F(50)))
    it = iter_shells_unbounded(spec)
    streamed = []
    for key, vs in it:
        if key.raw > 50:
            break
        streamed.append((key.raw, vs))
    assert streamed == [(k.raw, vs) for k, vs in bounded]


def test_product_norm_dim_check():
    with pytest.raises(ValueError):
        ProductNormSpec(2, 1, NormSpec(SUP, 1), NormSpec(SUP, 1))
