import math
from fractions import Fraction as F

import pytest

from diophlab.bestapprox import TargetMatrix, enumerate_best_approximations
from diophlab.lattice import INDETERMINATE, apply_flow, window_count, make_unipotent
from diophlab.norms import ProductNormSpec
from diophlab.orbit import (OrbitSeries, autocovariance, birkhoff_series,
                            shell_counts_via_bestapprox, variance_from_autocovariance,
                            verify_correspondence)
from diophlab.runner import sample_theta


def test_zero_target_series_oracle():
    # direct evaluations at t = 0, 1, 2 on the flowed identity lattice
    want = [window_count(apply_flow(make_unipotent(TargetMatrix.scalar(0)), t)).value
            for t in range(3)]
    series = birkhoff_series(TargetMatrix.scalar(0), 3)
    assert series.values == want == [2, 0, 0]
    assert series.indeterminate_count == 0


def test_first_entry_matches_standalone():
    theta = sample_theta(41, 0, (1, 1), 64)
    series = birkhoff_series(theta, 1)
    assert series.values[0] == window_count(make_unipotent(theta)).value


def test_partial_sums_nondecreasing():
    theta = sample_theta(41, 1, (1, 1), 64)
    series = birkhoff_series(theta, 12)
    total = 0
    partials = []
    for v in series.values:
        assert v is not INDETERMINATE
        total += v
        partials.append(total)
    assert partials == sorted(partials)


def test_shell_counts_half():
    theta = TargetMatrix.scalar(F(1, 2))
    assert shell_counts_via_bestapprox(theta, 0) == 2
    assert shell_counts_via_bestapprox(theta, 1) == 0
    with pytest.raises(ValueError):
        shell_counts_via_bestapprox(theta, -1)


def test_shell_counts_partition_total():
    theta = sample_theta(43, 0, (1, 1), 64)
    total = sum(shell_counts_via_bestapprox(theta, M) for M in range(6))
    seq = enumerate_best_approximations(theta, T=6)
    assert total == seq.count


@pytest.mark.parametrize("dims", [(1, 1), (2, 1)])
def test_correspondence_exact(dims):
    for trial in range(3):
        theta = sample_theta(47, trial, dims, 64)
        reports = verify_correspondence(theta, 6, ProductNormSpec.default(*dims))
        assert len(reports) == 6
        for rep in reports:
            assert rep.conclusive
            assert rep.match, (dims, trial, rep.M, rep.count_bestapprox, rep.f_value)


def test_correspondence_rational_degenerate():
    reports = verify_correspondence(TargetMatrix.scalar(F(1, 2)), 4)
    assert [r.count_bestapprox for r in reports] == [2, 0, 0, 0]
    assert reports[0].match and not reports[0].degenerate
    assert all(r.degenerate for r in reports[1:])
    for r in reports[1:]:
        assert (not r.conclusive) or r.f_value == 0


def test_correspondence_single_shell():
    theta = sample_theta(47, 9, (1, 1), 64)
    reports = verify_correspondence(theta, 1)
    assert len(reports) == 1 and reports[0].M == 0


def test_correspondence_wide_guard_band_never_wrong():
    # at low guard precision the band is wide; conclusive shells must still
    # agree exactly (band hits on orbit lattices are adjudicated exactly)
    for trial in range(3):
        theta = sample_theta(61, trial, (1, 1), 64)
        reports = verify_correspondence(theta, 5, precision=32)
        for rep in reports:
            if rep.conclusive:
                assert rep.match


def test_birkhoff_correspondence_inequality():
    # running sums bracket the count at the integer cut-off
    theta = sample_theta(53, 0, (1, 1), 64)
    T = 7
    series = birkhoff_series(theta, T + 1)
    lo = sum(series.values[:T])
    hi = sum(series.values[:T + 1])
    n = enumerate_best_approximations(theta, T=T).count
    assert lo <= n <= hi


def _const_series(value, n, length):
    return [OrbitSeries(f"c{i}", length, [value] * length, 128, 0, [math.inf] * length)
            for i in range(n)]


def test_autocovariance_constant_series():
    est = autocovariance(_const_series(4, 3, 60), s_max=20, burn_in=10)
    assert all(abs(e.xi_hat) < 1e-12 for e in est)
    assert all(e.stderr < 1e-12 for e in est)


def test_autocovariance_length_check():
    with pytest.raises(ValueError):
        autocovariance(_const_series(2, 2, 40), s_max=20, burn_in=10)


def test_autocovariance_real_ensemble():
    series = [birkhoff_series(sample_theta(59, k, (1, 1), 128), 60) for k in range(12)]
    est = autocovariance(series, s_max=20, burn_in=10)
    assert est[0].xi_hat > 0
    assert est[0].sample_count == 12 * 50
    assert all(e.stderr >= 0 or math.isnan(e.stderr) for e in est)
    total = variance_from_autocovariance(est)
    assert total > 0


def test_autocovariance_excludes_indeterminate_pairwise():
    values = [2] * 20 + [INDETERMINATE] + [2] * 39
    s = OrbitSeries("x", 60, values, 128, 1, [math.inf] * 60)
    est = autocovariance([s, _const_series(2, 1, 60)[0]], s_max=5, burn_in=10)
    # one indeterminate inside the window removes one pair at each lag
    assert est[0].sample_count == 2 * 50 - 1
    assert abs(est[0].xi_hat) < 1e-12
