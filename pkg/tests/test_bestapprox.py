import math
import random
from fractions import Fraction as F

import pytest

from diophlab.bestapprox import (TargetMatrix, cf_expand, cf_fast_count,
                                 enumerate_best_approximations, nearest_residual)
from diophlab.norms import EUCLIDEAN, SUP, NormSpec, ProductNormSpec
from diophlab.oracles import definitional_best_approximations
from diophlab.runner import sample_theta


def as_pairs(seq):
    return sorted((r.p, r.q) for r in seq.records)


# ---------------------------------------------------------------------------
# Inner minimisation


def test_nearest_residual_scan_oracle():
    # theta = [17/50], q = 3: oracle scan over p in -3..1
    theta = TargetMatrix.scalar(F(17, 50))
    best = min((abs(p + F(17, 50) * 3), p) for p in range(-3, 2))
    p, err, unique = nearest_residual(theta, (3,), NormSpec(SUP, 1))
    assert (err.raw, p[0]) == best == (F(1, 50), -1)
    assert unique


def test_nearest_residual_zero_target():
    theta = TargetMatrix.from_rows([[0, 0], [0, 0]])
    p, err, unique = nearest_residual(theta, (5, -3), NormSpec(SUP, 2))
    assert p == (0, 0) and err.raw == 0 and unique


def test_nearest_residual_half_integer_tie():
    theta = TargetMatrix.scalar(F(1, 2))
    p, err, unique = nearest_residual(theta, (1,), NormSpec(SUP, 1))
    assert err.raw == F(1, 2) and not unique


def test_nearest_residual_rejects_zero_q():
    with pytest.raises(ValueError):
        nearest_residual(TargetMatrix.scalar(F(1, 3)), (0,), NormSpec(SUP, 1))


# ---------------------------------------------------------------------------
# Enumeration versus the definitional oracle


def test_half_target_exact():
    seq = enumerate_best_approximations(TargetMatrix.scalar(F(1, 2)), qmax=3)
    assert as_pairs(seq) == [((-1,), (2,)), ((1,), (-2,))]
    assert seq.exhausted_rational


def test_zero_target_minimal_shell():
    seq = enumerate_best_approximations(TargetMatrix.scalar(0), T=2)
    assert as_pairs(seq) == [((0,), (-1,)), ((0,), (1,))]
    assert seq.exhausted_rational


def test_dyadic_matches_bruteforce_at_100():
    theta = sample_theta(7, 0, (1, 1), 32)
    seq = enumerate_best_approximations(theta, qmax=100)
    assert as_pairs(seq) == definitional_best_approximations(theta, F(100))


@pytest.mark.parametrize("dims", [(1, 1), (1, 2), (2, 1), (2, 2)])
def test_definitional_oracle_random(dims):
    rng = random.Random(sum(dims))
    for trial in range(6):
        theta = sample_theta(101, trial, dims, 24)
        qmax = F(rng.randint(4, 18))
        norms = ProductNormSpec.default(*dims)
        got = as_pairs(enumerate_best_approximations(theta, qmax=qmax, norms=norms))
        assert got == definitional_best_approximations(theta, qmax, norms)


def test_euclidean_norms_against_oracle():
    norms = ProductNormSpec.default(2, 2, EUCLIDEAN, EUCLIDEAN)
    for trial in range(3):
        theta = sample_theta(55, trial, (2, 2), 20)
        got = as_pairs(enumerate_best_approximations(theta, qmax=8, norms=norms))
        assert got == definitional_best_approximations(theta, F(8), norms)


def test_monotone_errors_and_sign_closure():
    for trial in range(5):
        theta = sample_theta(77, trial, (2, 1), 40)
        seq = enumerate_best_approximations(theta, qmax=60)
        errs = [r.err for r in seq.records[::2]]
        qnorms = [r.qnorm for r in seq.records[::2]]
        for a_err, b_err, a_q, b_q in zip(errs, errs[1:], qnorms, qnorms[1:]):
            assert a_q < b_q
            assert b_err < a_err
        pairs = set(as_pairs(seq))
        for p, q in pairs:
            assert (tuple(-c for c in p), tuple(-c for c in q)) in pairs
        unsigned = enumerate_best_approximations(theta, qmax=60, sign_mode="unsigned")
        assert seq.count == 2 * unsigned.count


def test_engines_agree():
    rng = random.Random(12)
    for trial in range(8):
        m = rng.choice([1, 2])
        theta = sample_theta(13, trial, (m, 2), rng.choice([16, 24, 64]))
        qmax = F(rng.randint(5, 35))
        norms = ProductNormSpec.default(m, 2)
        exact = as_pairs(enumerate_best_approximations(theta, qmax=qmax, norms=norms,
                                                       engine="exact"))
        fast = as_pairs(enumerate_best_approximations(theta, qmax=qmax, norms=norms,
                                                      engine="dyadic"))
        assert exact == fast


def test_exponent_cutoff_matches_rational_cutoff():
    theta = sample_theta(7, 3, (1, 1), 64)
    # e^3 = 20.08...: the T form must agree with the exact bound 20
    a = as_pairs(enumerate_best_approximations(theta, T=3))
    b = as_pairs(enumerate_best_approximations(theta, qmax=20))
    assert a == b


def test_shell_indices_partition_the_range():
    theta = sample_theta(7, 4, (1, 1), 64)
    seq = enumerate_best_approximations(theta, T=6)
    hist = seq.shell_histogram()
    assert sum(hist.values()) == seq.count
    assert all(0 <= M < 6 for M in hist)
    for rec in seq.records:
        q = abs(rec.q[0])
        assert math.floor(math.log(q)) == rec.shell_index


# ---------------------------------------------------------------------------
# Continued fractions


def test_cf_17_over_50():
    cf = cf_expand(F(17, 50))
    assert list(cf.quotients) == [0, 2, 1, 16]
    assert list(cf.convergents) == [(0, 1), (1, 2), (1, 3), (17, 50)]
    assert cf.exact


def test_cf_third():
    cf = cf_expand(F(1, 3))
    assert list(cf.quotients) == [0, 3]
    assert list(cf.convergents) == [(0, 1), (1, 3)]


def test_cf_golden_dyadic_truncation():
    golden = (math.sqrt(5) - 1) / 2
    approx = F(int(golden * 2**64), 2**64)
    cf = cf_expand(approx)
    # leading quotients all 1 until the 64-bit precision exhausts
    assert all(a == 1 for a in cf.quotients[1:20])


def test_cf_recurrences_and_canonical_form():
    rng = random.Random(5)
    for _ in range(40):
        den = rng.randint(2, 10**6)
        num = rng.randint(1, den - 1)
        cf = cf_expand(F(num, den))
        qs = cf.quotients
        assert all(a >= 1 for a in qs[1:])
        assert qs[-1] >= 2 or len(qs) == 1
        conv = cf.convergents
        assert conv[-1] == (num // math.gcd(num, den), den // math.gcd(num, den))
        for (p0, q0), (p1, q1) in zip(conv, conv[1:]):
            assert math.gcd(p1, q1) == 1
            assert q1 >= q0
        ps = [1] + [p for p, _ in conv]
        ks = [0] + [q for _, q in conv]
        for j in range(2, len(conv)):
            a = qs[j]
            assert ps[j + 1] == a * ps[j] + ps[j - 1]
            assert ks[j + 1] == a * ks[j] + ks[j - 1]


def test_cf_rejects_out_of_range():
    with pytest.raises(ValueError):
        cf_expand(F(3, 2))


def test_cf_kmax_truncation():
    cf = cf_expand(F(17, 50), k_max=2)
    assert list(cf.quotients) == [0, 2, 1]
    assert list(cf.convergents) == [(0, 1), (1, 2), (1, 3)]
    assert not cf.exact


def test_enumeration_empty_below_first_shell():
    seq = enumerate_best_approximations(TargetMatrix.scalar(F(1, 3)), qmax=F(1, 2))
    assert seq.records == [] and not seq.exhausted_rational
    seq = enumerate_best_approximations(TargetMatrix.scalar(F(1, 3)), T=F(-2))
    assert seq.records == []


def test_fast_count_validation_against_enumeration():
    rng = random.Random(99)
    for _ in range(100):
        den = rng.randint(2, 10**4)
        num = rng.randint(0, den - 1)
        theta = F(num, den)
        qmax = F(rng.randint(1, 10**4))
        fast = cf_fast_count(theta, qmax=qmax, sign_mode="signed")
        exact = enumerate_best_approximations(TargetMatrix.scalar(theta), qmax=qmax).count
        assert fast == exact, (theta, qmax)


def test_fast_count_edge_cases():
    assert cf_fast_count(F(17, 50), T=F(-1)) == 0
    assert cf_fast_count(F(1, 3), qmax=2, sign_mode="unsigned") == \
        enumerate_best_approximations(TargetMatrix.scalar(F(1, 3)), qmax=2,
                                      sign_mode="unsigned").count
    # exactly-half target: tie at q=1, so only the exact hit at q=2
    assert cf_fast_count(F(1, 2), qmax=2, sign_mode="unsigned") == 1
    assert cf_fast_count(0, qmax=5, sign_mode="signed") == 2
    # translation invariance
    assert cf_fast_count(F(7, 3), qmax=50) == cf_fast_count(F(1, 3), qmax=50)
