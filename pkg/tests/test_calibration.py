import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ggmech.calibration import (
    MechanismSpec,
    PrivacyBudget,
    calibrate_composed,
    calibrate_sigma_ggauss,
    calibrate_sigma_pq,
    calibration_record,
    empirical_calibrate,
    privacy_loss_statistic,
    round_p,
    sigma_branches,
    validate_params,
)
from ggmech.distributions import sample_ggauss_batch
from ggmech.errors import CalibrationError, ParameterError
from ggmech.streams import RandomStream

B = PrivacyBudget(1.0, 1e-3)


# Budget and spec validation


@pytest.mark.parametrize("eps,delta", [(0.0, 0.1), (-1.0, 0.1), (1.0, 0.0), (1.0, 1.0), (1.0, 1.5),
                                       (float("nan"), 0.1)])
def test_budget_rejects_out_of_range(eps, delta):
    with pytest.raises(ParameterError):
        PrivacyBudget(eps, delta)


def test_spec_validation():
    with pytest.raises(ParameterError):
        MechanismSpec("nope")
    with pytest.raises(ParameterError):
        MechanismSpec("ggauss_pq", p=4.0)
    with pytest.raises(ParameterError):
        MechanismSpec("ggauss_pq", p=2.0, q=4.0)
    with pytest.raises(ParameterError):
        MechanismSpec("ggauss", sigma=0.0)
    with pytest.raises(ParameterError):
        MechanismSpec("ggauss", log_base="base10")
    assert MechanismSpec("ggauss", p=4.0).as_dict()["truncate"] is True


# validate_params


def test_p_rounds_up_to_even():
    assert validate_params(1 << 20, 5, B).p == 6
    assert validate_params(1 << 20, 3.2, B).p == 4
    assert round_p(4) == 4 and round_p(4.0001) == 6 and round_p(1) == 4


def test_delta_at_one_over_k_is_not_above_max():
    # at k=16 the other two range checks necessarily fire: ln 16 < 4 and
    # 2^(-0.001*16/4) is close to 1, so only the delta <= 1/k boundary is asserted
    v = validate_params(16, 4, PrivacyBudget(1.0, 1 / 16))
    assert "delta_above_max" not in v.warnings
    assert "delta_above_max" in validate_params(16, 4, PrivacyBudget(1.0, 0.07)).warnings


def test_in_range_parameters_have_no_warnings():
    v = validate_params(1 << 20, 4, PrivacyBudget(1.0, 1e-7))
    assert v.in_range


def test_range_violations_are_warnings():
    v = validate_params(1000, 12, PrivacyBudget(1.0, 1e-300))
    assert {"p_above_log_k", "delta_below_min"} <= set(v.warnings)


@pytest.mark.parametrize("k", [1, 0, 2.5])
def test_validate_rejects_small_k(k):
    with pytest.raises(ParameterError):
        validate_params(k, 4, B)


# Analytic sigma


def test_sigma_reference_value():
    s = calibrate_sigma_ggauss(10000, 4, B)
    assert s == pytest.approx(math.sqrt(10000 * 4 * math.log(1000)), rel=1e-12)
    assert s == pytest.approx(525.65, abs=0.01)
    first, second = sigma_branches(10000, 4, B)
    assert second == pytest.approx(100.0)
    assert s == first > second


def test_sigma_halves_when_epsilon_doubles():
    a = calibrate_sigma_ggauss(10000, 4, PrivacyBudget(1.0, 1e-3))
    b = calibrate_sigma_ggauss(10000, 4, PrivacyBudget(2.0, 1e-3))
    assert b == pytest.approx(a / 2, rel=1e-12)


def test_second_branch_selected_for_large_epsilon():
    b = PrivacyBudget(100.0, 0.5)
    first, second = sigma_branches(64, 4, b)
    assert second > first
    assert calibrate_sigma_ggauss(64, 4, b) == second


@given(st.integers(2, 10 ** 6), st.sampled_from([4, 6, 8, 16]), st.floats(0.01, 10.0),
       st.floats(1e-12, 0.5), st.floats(0.01, 100.0))
@settings(max_examples=100, deadline=None)
def test_sigma_is_scale_covariant_max_of_branches(k, p, eps, delta, c):
    b = PrivacyBudget(eps, delta)
    s1 = calibrate_sigma_ggauss(k, p, b, 1.0)
    assert calibrate_sigma_ggauss(k, p, b, c) == pytest.approx(c * s1, rel=1e-12)
    assert s1 == max(sigma_branches(k, p, b))


def test_base2_logs_increase_sigma():
    assert calibrate_sigma_ggauss(10000, 4, B, log_base="base2") == pytest.approx(
        math.sqrt(10000 * 4 * math.log2(1000)))


def test_pq_sigma_reference_value():
    s = calibrate_sigma_pq(10000, 4, 2, B)
    assert s == pytest.approx(10.0 * math.sqrt(4 * math.log(1000)), rel=1e-12)
    assert s == pytest.approx(52.565, abs=1e-3)


def test_pq_sigma_with_q_equal_p_matches_ggauss():
    assert calibrate_sigma_pq(4096, 8, 8, B) == pytest.approx(calibrate_sigma_ggauss(4096, 8, B), rel=1e-14)


def test_pq_sigma_halves_when_epsilon_doubles():
    a = calibrate_sigma_pq(10000, 4, 2, PrivacyBudget(1.0, 1e-3))
    b = calibrate_sigma_pq(10000, 4, 2, PrivacyBudget(2.0, 1e-3))
    assert b == pytest.approx(a / 2)


def test_pq_sigma_rejects_q_above_p():
    with pytest.raises(ParameterError):
        calibrate_sigma_pq(100, 2, 4, B)


# Composed parameters


def test_composed_reference_values():
    k = 2 ** 16
    c = calibrate_composed(k, 4, PrivacyBudget(1.0, 1e-4), 1.0)
    lnk = math.log(k)
    assert lnk == pytest.approx(11.0904, abs=1e-4)
    assert c.c_sv == math.floor(4 * k / lnk ** 4) == 17
    assert c.alpha_sv / c.sigma == pytest.approx(12 * math.log(lnk) ** 0.25, rel=1e-12)
    assert c.alpha_sv / c.sigma == pytest.approx(14.949, rel=1e-3)
    assert c.sigma == calibrate_sigma_ggauss(k, 4, PrivacyBudget(0.5, 1e-4 / 3))
    assert c.beta_sv == pytest.approx(math.exp(-lnk) / 2)
    assert not c.degenerate


@given(st.integers(16, 1 << 24), st.floats(0.0, 3.0), st.floats(0.01, 10.0), st.floats(1e-10, 0.5))
@settings(max_examples=100, deadline=None)
def test_composed_invariants(k, t, eps, delta):
    c = calibrate_composed(k, 4, PrivacyBudget(eps, delta), t)
    assert 1 <= c.c_sv <= k
    assert c.eps_sv + c.eps_sv == pytest.approx(eps)
    assert 3 * c.delta_sv == pytest.approx(delta)
    assert 0 < c.beta_sv < 1
    assert c.alpha_sv >= 0
    assert c.degenerate == (c.c_sv_raw < 1)


def test_composed_floors_budget_count_with_warning():
    c = calibrate_composed(2 ** 16, 4, PrivacyBudget(1.0, 1e-4), 2.0)
    assert c.c_sv == 1 and c.degenerate
    assert any("floored" in w for w in c.warnings)


def test_composed_warns_for_large_t():
    c = calibrate_composed(2 ** 10, 4, B, 10.0)
    assert any("log log k" in w for w in c.warnings)


@pytest.mark.parametrize("k,t", [(15, 1.0), (8, 1.0), (1024, -1.0), (1024, float("inf"))])
def test_composed_rejects_bad_inputs(k, t):
    with pytest.raises(ParameterError):
        calibrate_composed(k, 4, B, t)


def test_calibration_record_is_json_ready():
    rec = calibration_record(2 ** 16, 4, PrivacyBudget(1.0, 1e-4), family="composed", t=1.0)
    text = json.dumps(rec)
    assert json.loads(text)["composed"]["c_sv"] == 17
    rec = calibration_record(10000, 4, B)
    assert rec["sigma"] == max(rec["branches"].values())
    with pytest.raises(ParameterError):
        calibration_record(100, 4, B, family="laplace")


# Privacy-loss statistic and empirical calibration


def test_zero_shift_loss_is_identically_zero(stream):
    x = sample_ggauss_batch(1000, 32, 4.0, 3.0, stream)
    assert np.all(privacy_loss_statistic(x, np.zeros(32), 3.0, 4.0) == 0.0)


def test_loss_statistic_matches_direct_norms(stream):
    x = sample_ggauss_batch(50, 16, 4.0, 2.0, stream)
    direct = [(np.sum(np.abs(r - 1) ** 4) - np.sum(np.abs(r) ** 4)) / 2.0 ** 4 for r in x]
    assert np.allclose(privacy_loss_statistic(x, np.ones(16), 2.0, 4.0), direct, rtol=1e-10)


def test_doubling_sigma_does_not_increase_violation():
    b = PrivacyBudget(1.0, 0.01)
    sigma = empirical_calibrate(64, 4, b, 50_000, RandomStream(2))
    rates = []
    for s in (sigma, 2 * sigma):
        x = sample_ggauss_batch(50_000, 64, 4.0, 1.0, RandomStream(3)) * s
        rates.append(np.mean(privacy_loss_statistic(x, np.ones(64), s, 4.0) > 1.0))
    assert rates[1] <= rates[0]


def test_empirical_sigma_below_generous_analytic():
    b = PrivacyBudget(1.0, 0.01)
    sigma = empirical_calibrate(64, 4, b, 100_000, RandomStream(4))
    assert sigma <= calibrate_sigma_ggauss(64, 4, b, c_sigma=8.0)


def test_empirical_sigma_monotone_on_grid():
    grid = {}
    for eps in (0.5, 1.0, 2.0):
        for delta in (0.005, 0.01, 0.05):
            grid[eps, delta] = empirical_calibrate(64, 4, PrivacyBudget(eps, delta), 20_000, RandomStream(5))
    for (eps, delta), s in grid.items():
        for (e2, d2), s2 in grid.items():
            if e2 >= eps and d2 >= delta:
                assert s2 <= s


def test_empirical_calibration_odd_p_path():
    # non-even p uses the direct statistic instead of power sums
    sigma = empirical_calibrate(32, 3, PrivacyBudget(1.0, 0.05), 20_000, RandomStream(6))
    assert sigma > 0


def test_empirical_calibration_reports_bracket_exhaustion():
    with pytest.raises(CalibrationError) as info:
        empirical_calibrate(64, 4, PrivacyBudget(1.0, 0.01), 20_000, RandomStream(7), max_doublings=0)
    assert "sigma" in info.value.diagnostics


def test_empirical_calibration_rejects_bad_trials():
    with pytest.raises(ParameterError):
        empirical_calibrate(64, 4, B, 0, RandomStream(1))
