import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp
from scipy import integrate, special, stats

from ggmech.distributions import (
    GGammaParams,
    NoiseVector,
    lp_norm,
    pth_power_sum,
    sample_gamma,
    sample_ggamma,
    sample_ggauss_batch,
    sample_ggauss_pq_batch,
    sample_ggauss_pq_vector,
    sample_ggauss_vector,
    sample_laplace,
    sample_lp_sphere,
    sample_lp_sphere_batch,
    sample_univariate_ggauss,
)
from ggmech.errors import ParameterError
from ggmech.streams import RandomStream

N = 10 ** 6


def se(x):
    return x.std(ddof=1) / math.sqrt(x.size)


# Gamma


def test_gamma_shape_one_is_exponential(stream):
    x = sample_gamma(1.0, stream, size=N)
    assert abs(x.mean() - 1.0) <= 0.005
    assert stats.kstest(x, "expon").pvalue > 1e-3


def test_gamma_moments_shape_2_5(stream):
    x = sample_gamma(2.5, stream, size=N)
    assert abs(x.mean() - 2.5) <= 5 * se(x)
    target = special.gamma(4.5) / special.gamma(2.5)
    assert target == pytest.approx(8.75)
    assert abs((x ** 2).mean() - target) <= 5 * se(x ** 2)


def test_gamma_shape_25_mean_and_variance(stream):
    x = sample_gamma(25.0, stream, size=N)
    assert x.mean() == pytest.approx(25.0, rel=0.01)
    assert x.var() == pytest.approx(25.0, rel=0.01)


def test_gamma_small_shape_against_cdf(stream):
    x = sample_gamma(0.25, stream, size=200_000)
    assert x.min() > 0
    assert stats.kstest(x, stats.gamma(0.25).cdf).pvalue > 1e-3


@pytest.mark.parametrize("shape", [0.0, -1.0, float("nan")])
def test_gamma_rejects_bad_shape(stream, shape):
    with pytest.raises(ParameterError):
        sample_gamma(shape, stream)


# Laplace


def test_laplace_tail(stream):
    x = sample_laplace(1.0, stream, size=N)
    for t in (1, 2, 4):
        est = np.mean(np.abs(x) >= t)
        assert est <= math.exp(-t) + 3 * math.sqrt(est * (1 - est) / N)


def test_laplace_symmetric(stream):
    x = sample_laplace(1.0, stream, size=N)
    assert abs(x.mean()) <= 5 * se(x)


def test_laplace_mean_abs_equals_scale(stream):
    x = sample_laplace(3.0, stream, size=N)
    assert np.abs(x).mean() == pytest.approx(3.0, rel=0.01)
    assert stats.kstest(x, stats.laplace(scale=3.0).cdf).pvalue > 1e-3


def test_laplace_rejects_bad_scale(stream):
    with pytest.raises(ParameterError):
        sample_laplace(0.0, stream)


# Univariate Generalized Gaussian


def test_ggauss_p1_is_laplace(stream):
    a = sample_univariate_ggauss(1.0, 2.0, stream, size=N)
    b = sample_laplace(2.0, stream, size=N)
    assert stats.ks_2samp(a, b).statistic < 0.003


def test_ggauss_p2_variance_half(stream):
    x = sample_univariate_ggauss(2.0, 1.0, stream, size=N)
    v = x ** 2
    assert abs(v.mean() - 0.5) <= 5 * se(v)


def test_ggauss_p4_mean_abs(stream):
    x = np.abs(sample_univariate_ggauss(4.0, 1.0, stream, size=N))
    target = special.gamma(0.5) / special.gamma(0.25)
    assert target == pytest.approx(0.4890, abs=2e-4)
    assert x.mean() == pytest.approx(target, rel=0.01)


@pytest.mark.parametrize("p", [1.5, 3.0, 6.0])
def test_ggauss_cdf_against_quadrature(stream, p):
    sigma = 1.7
    x = sample_univariate_ggauss(p, sigma, stream, size=400_000)
    norm = 2 * sigma * special.gamma(1 + 1 / p)

    def cdf(t):
        body, _ = integrate.quad(lambda u: math.exp(-(abs(u) / sigma) ** p), 0.0, abs(t))
        return 0.5 + math.copysign(body, t) / norm

    for t in (-2.5, -1.0, -0.2, 0.0, 0.3, 1.2, 3.0):
        f = cdf(t)
        emp = np.mean(x <= t)
        assert abs(emp - f) <= 5 * math.sqrt(f * (1 - f) / x.size) + 1e-12
    # an independent closed form of the same law
    assert stats.kstest(x, stats.gennorm(p, scale=sigma).cdf).pvalue > 1e-3


@pytest.mark.parametrize("p,sigma", [(0.5, 1.0), (2.0, 0.0), (2.0, -1.0)])
def test_ggauss_rejects_bad_parameters(stream, p, sigma):
    with pytest.raises(ParameterError):
        sample_univariate_ggauss(p, sigma, stream)


# Multivariate Generalized Gaussian


def test_radius_law_k100_p4(stream):
    x = sample_ggauss_batch(100_000, 100, 4.0, 1.0, stream)
    r = lp_norm(x, 4.0) ** 4
    assert abs(r.mean() - 25.0) <= 5 * se(r)
    # Gamma(25) has variance 25; the sample variance has SE about sqrt(2*25^2/n)
    assert abs(r.var(ddof=1) - 25.0) <= 5 * 25.0 * math.sqrt(2 / r.size + 6 / 25 / r.size)


def test_k1_vector_matches_univariate():
    a = sample_ggauss_vector(1, 4.0, 2.0, RandomStream(11)).values
    b = sample_univariate_ggauss(4.0, 2.0, RandomStream(11), size=1)
    assert np.array_equal(a, b)


def test_normalized_vector_matches_sphere_caps(stream):
    n, k, p = 200_000, 50, 4.0
    x = sample_ggauss_batch(n, k, p, 1.0, stream)
    y = sample_lp_sphere_batch(n, k, p, 1.0, stream)
    ra = np.abs(x[:, 0]) / lp_norm(x, p)
    rb = np.abs(y[:, 0])
    for r in (0.2, 0.3, 0.4):
        pa, pb = np.mean(ra >= r), np.mean(rb >= r)
        s = math.sqrt((pa * (1 - pa) + pb * (1 - pb)) / n)
        assert abs(pa - pb) <= 3 * s + 1e-12


def test_same_seed_same_vector():
    a = sample_ggauss_vector(64, 6.0, 3.0, RandomStream(5)).values
    b = sample_ggauss_vector(64, 6.0, 3.0, RandomStream(5)).values
    assert np.array_equal(a, b)


def test_coordinates_uncorrelated(stream):
    x = sample_ggauss_batch(50_000, 4, 4.0, 1.0, stream)
    c = np.corrcoef(x.T)[~np.eye(4, dtype=bool)]
    assert np.all(np.abs(c) <= 3 / math.sqrt(50_000) * 1.5)


# Generalized Gamma


def test_ggamma_privacy_loss_mean(stream):
    params = GGammaParams.for_privacy_loss(4.0)
    assert (params.a, params.b) == pytest.approx((1 / 3, 4 / 3))
    x = sample_ggamma(params, stream, size=N)
    target = 1 / special.gamma(0.25)
    assert target == pytest.approx(0.27581, abs=1e-5)
    assert 1 / 4 <= target < 1.2 / 4
    assert x.mean() == pytest.approx(target, rel=0.01)


def test_ggamma_second_moment(stream):
    params = GGammaParams(1 / 3, 4 / 3)
    x = sample_ggamma(params, stream, size=N)
    target = special.gamma(7 / 4) / special.gamma(1 / 4)
    assert (x ** 2).mean() == pytest.approx(target, rel=0.01)
    assert params.moment(2) == pytest.approx(target, rel=1e-12)


def test_ggamma_a1_b1_is_exponential(stream):
    x = sample_ggamma(GGammaParams(1.0, 1.0), stream, size=200_000)
    assert stats.kstest(x, "expon").pvalue > 1e-3


@given(st.floats(0.05, 5.0), st.floats(0.2, 5.0), st.floats(0.0, 4.0))
@settings(max_examples=60, deadline=None)
def test_ggamma_moment_formula(a, b, r):
    params = GGammaParams(a, b)
    target = special.gamma((a + r) / b) / special.gamma(a / b)
    assert params.moment(r) == pytest.approx(target, rel=1e-9)


@pytest.mark.parametrize("a,b", [(0.0, 1.0), (1.0, -2.0), (float("inf"), 1.0)])
def test_ggamma_rejects_bad_params(a, b):
    with pytest.raises(ParameterError):
        GGammaParams(a, b)


def test_ggamma_sampler_requires_params(stream):
    with pytest.raises(ParameterError):
        sample_ggamma((1.0, 1.0), stream)


# Sphere


@given(st.integers(1, 40), st.floats(1.0, 12.0), st.floats(0.1, 100.0), st.integers(0, 2 ** 32))
@settings(max_examples=50, deadline=None)
def test_sphere_point_has_requested_norm(k, p, radius, seed):
    v = sample_lp_sphere(k, p, radius, RandomStream(seed))
    assert v.norm(p) == pytest.approx(radius, rel=1e-10)


def test_circle_angles_uniform(stream):
    y = sample_lp_sphere_batch(N, 2, 2.0, 1.0, stream)
    ang = np.mod(np.arctan2(y[:, 1], y[:, 0]), 2 * np.pi)
    counts, _ = np.histogram(ang, bins=16, range=(0, 2 * np.pi))
    assert stats.chisquare(counts).pvalue > 1e-3


def test_sphere_cap_bound_k50_p4(stream):
    y = sample_lp_sphere_batch(N, 50, 4.0, 1.0, stream)
    a = np.abs(y[:, 0])
    for r in (0.3, 0.4, 0.5):
        est = np.mean(a >= r)
        assert est <= (1 - r ** 4) ** (49 / 4) + 3 * math.sqrt(est * (1 - est) / N)


@pytest.mark.parametrize("k,p", [(5, 2.0), (50, 4.0), (20, 8.0)])
def test_sphere_coordinate_follows_beta_law(stream, k, p):
    # |y_1|^p on the unit sphere is Beta(1/p, (k-1)/p) under the cone measure
    y = sample_lp_sphere_batch(200_000, k, p, 1.0, stream)
    z = np.abs(y[:, 0]) ** p
    assert stats.kstest(z, stats.beta(1 / p, (k - 1) / p).cdf).pvalue > 1e-3


# (p, q) law


def test_pq_radius_law(stream):
    x = sample_ggauss_pq_batch(100_000, 100, 4.0, 2.0, 1.0, stream)
    r = lp_norm(x, 4.0) ** 2
    assert abs(r.mean() - 50.0) <= 5 * se(r)


def test_pq_with_q_equal_p_matches_iid_law(stream):
    n, k, p = 200_000, 8, 4.0
    x = sample_ggauss_pq_batch(n, k, p, p, 1.5, stream)
    y = sample_ggauss_batch(n, k, p, 1.5, stream)
    assert stats.ks_2samp(lp_norm(x, p), lp_norm(y, p)).pvalue > 1e-3
    assert stats.ks_2samp(np.abs(x[:, 0]), np.abs(y[:, 0])).pvalue > 1e-3


def test_pq_rejects_q_above_p(stream):
    with pytest.raises(ParameterError):
        sample_ggauss_pq_vector(10, 2.0, 4.0, 1.0, stream)


def test_pq_exceedance_indicators_not_positively_correlated(stream):
    n, k = N, 50
    parts_a, parts_b = [], []
    for _ in range(10):
        x = sample_ggauss_pq_batch(n // 10, k, 4.0, 2.0, 1.0, stream)
        nrm = lp_norm(x, 4.0)
        parts_a.append(np.abs(x[:, 0]) >= 0.3 * nrm)
        parts_b.append(np.abs(x[:, 1]) >= 0.3 * nrm)
    a = np.concatenate(parts_a).astype(float)
    b = np.concatenate(parts_b).astype(float)
    assert np.corrcoef(a, b)[0, 1] <= 3 / math.sqrt(n)


# Norms and NoiseVector


# the naive reference underflows for tiny entries; extremes are covered below
_moderate = st.floats(-1e6, 1e6).filter(lambda v: v == 0 or abs(v) > 1e-30)


@given(hnp.arrays(np.float64, st.integers(1, 50), elements=_moderate),
       st.sampled_from([1.0, 2.0, 3.0, 4.0, 7.5]))
@settings(max_examples=80, deadline=None)
def test_lp_norm_matches_reference(x, p):
    ref = float(np.sum(np.abs(x) ** p) ** (1 / p))
    assert lp_norm(x, p) == pytest.approx(ref, rel=1e-9, abs=1e-300)


@given(hnp.arrays(np.int64, st.integers(1, 60), elements=st.integers(-1000, 1000)))
@settings(max_examples=60, deadline=None)
def test_pth_power_sum_is_exact_on_integers(x):
    assert pth_power_sum(x.astype(float), 4.0) == float(sum(int(v) ** 4 for v in x))


def test_lp_norm_extremes():
    assert lp_norm(np.array([1e200, 1e200]), 4.0) == pytest.approx(1e200 * 2 ** 0.25)
    assert lp_norm(np.array([1e-200, 0.0]), 8.0) == pytest.approx(1e-200)
    assert lp_norm(np.array([3.0, -5.0, 1.0]), math.inf) == 5.0
    assert lp_norm(np.zeros(4), 4.0) == 0.0


def test_noise_vector_caches_consistently(stream):
    v = sample_ggauss_vector(2 ** 12, 8.0, 1.0, stream)
    first = v.norm(8.0)
    assert v.norm(8.0) == first
    v.norm(2.0)
    assert set(v.cached_norms()) == {8.0, 2.0}
    assert v.cache_consistent()


def test_noise_vector_is_read_only():
    v = NoiseVector(np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        v.values[0] = 5.0
    assert v.k == len(v) == 2
