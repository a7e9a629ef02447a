import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from app.experiments.simulation import geometric_sum_cf, limit_law, simulate_geometric_sum
from app.metrics.checks import concentration_check, product_metric_check, smoothing_check
from app.metrics.distances import (
    DistanceEstimate,
    cf_lower_bounds,
    d2_lower_bound_cf,
    dkw_radius,
    kolmogorov_empirical,
    kolmogorov_exact,
    wasserstein1,
    wasserstein1_cdf,
    wasserstein1_empirical,
)
from app.models.distributions import LaplaceParams, ScaledBetaRoot, laplace_handle, normal_handle, rayleigh_handle
from app.models.summands import rademacher
from app.utils.errors import DomainError
from app.utils.rng import make_rng

LAPLACE = laplace_handle(LaplaceParams(0.0, 1.0))


def test_distance_estimate_is_nonnegative():
    with pytest.raises(DomainError):
        DistanceEstimate(-0.1, 0.0, "grid")
    assert DistanceEstimate(0.2, 0.01, "ks").to_json() == {"value": 0.2, "error_bound": 0.01, "method": "ks"}


def test_dkw_radius():
    assert dkw_radius(100, 0.05) == pytest.approx(math.sqrt(math.log(40.0) / 200.0))
    with pytest.raises(DomainError):
        dkw_radius(0)


def test_kolmogorov_exact_scaled_beta_root():
    un = ScaledBetaRoot(2)
    u = rayleigh_handle(1 / math.sqrt(2.0))
    d = kolmogorov_exact(un.cdf, u.cdf, 0.0, 7.0, (math.sqrt(2.0),))
    assert d.value == pytest.approx(0.5 - math.log(2.0) / 2, abs=1e-6)
    assert d.error_bound < 2e-3


def test_kolmogorov_exact_of_equal_laws_is_zero():
    d = kolmogorov_exact(LAPLACE.cdf, LAPLACE.cdf, -20.0, 20.0)
    assert d.value == 0.0


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), size=st.integers(5, 400))
def test_kolmogorov_empirical_matches_scipy(seed, size):
    sample = LAPLACE.sample(make_rng(seed), size)
    ours = kolmogorov_empirical(sample, LAPLACE.cdf)
    theirs = stats.kstest(sample, LAPLACE.cdf).statistic
    assert ours.value == pytest.approx(theirs, abs=1e-12)
    assert ours.error_bound == pytest.approx(dkw_radius(size))


def test_wasserstein_cdf_of_shift():
    shifted = laplace_handle(LaplaceParams(1.0, 1.0))
    assert wasserstein1_cdf(LAPLACE.cdf, shifted.cdf, points=(1.0,)).value == pytest.approx(1.0, abs=1e-8)
    assert wasserstein1(LAPLACE, shifted, points=(1.0,)).value == pytest.approx(1.0, abs=1e-8)


def test_wasserstein_empirical_single_point():
    assert wasserstein1_empirical(np.array([0.0]), LAPLACE).value == pytest.approx(1.0)


def test_wasserstein_empirical_matches_quadrature():
    sample = np.sort(LAPLACE.sample(make_rng(17), 7))

    def F_n(t):
        return np.searchsorted(sample, t, side="right") / sample.size

    direct = wasserstein1_cdf(F_n, LAPLACE.cdf, -60.0, 60.0, tuple(sample))
    exact = wasserstein1_empirical(sample, LAPLACE)
    assert exact.value == pytest.approx(direct.value, abs=1e-8)
    assert wasserstein1(sample, LAPLACE).value == pytest.approx(exact.value)


def test_wasserstein_empirical_needs_stop_loss():
    with pytest.raises(DomainError):
        wasserstein1_empirical(np.array([0.1, 0.2]), rayleigh_handle(1.0))


def test_cf_lower_bounds():
    normal = normal_handle(1.0)
    assert d2_lower_bound_cf(LAPLACE.cf, LAPLACE.cf, [0.5, 1.0]) == 0.0
    d2, d12 = cf_lower_bounds(LAPLACE.cf, normal.cf)
    assert 0 < d12 <= d2
    with pytest.raises(DomainError):
        d2_lower_bound_cf(LAPLACE.cf, normal.cf, [0.0, 1.0])


def test_concentration_and_smoothing_checks_pass_for_the_limit():
    sample = LAPLACE.sample(make_rng(23), 50_000)
    assert concentration_check(sample, LaplaceParams(0.0, 1.0), -0.5, 0.7).passed
    assert smoothing_check(sample, 1.0, 0.2).passed
    with pytest.raises(DomainError):
        concentration_check(sample, LaplaceParams(0.0, 1.0), 1.0, 0.0)


def test_product_metric_checks():
    y1 = normal_handle(1.0)
    y2 = laplace_handle(LaplaceParams(0.0, 1 / math.sqrt(2.0)))
    z = rayleigh_handle(1 / math.sqrt(2.0))
    for metric in ("K", "W"):
        result = product_metric_check(y1, y2, z, z, metric=metric, count=100_000, seed=3)
        assert result.passed, result.to_json()
    with pytest.raises(DomainError):
        product_metric_check(y1, y2, z, z, metric="d12", count=1000)


def test_kolmogorov_exact_is_invariant_under_cube():
    f1 = laplace_handle(LaplaceParams(0.0, 0.5)).cdf
    f2 = normal_handle(0.5).cdf
    direct = kolmogorov_exact(f1, f2, -6.0, 6.0)
    cubed = kolmogorov_exact(
        lambda z: f1(np.cbrt(z)),
        lambda z: f2(np.cbrt(z)),
        -216.0,
        216.0,
        np.linspace(-6.0, 6.0, 2001) ** 3,
    )
    assert direct.value > 0.01
    assert cubed.value == pytest.approx(direct.value, abs=1e-7)


@settings(max_examples=15, deadline=None)
@given(c=st.floats(0.2, 5.0))
def test_wasserstein_cdf_scales_with_the_laws(c):
    f1, f2 = LAPLACE.cdf, normal_handle(1.0).cdf
    base = wasserstein1_cdf(f1, f2).value
    scaled = wasserstein1_cdf(lambda t: f1(t / c), lambda t: f2(t / c)).value
    assert scaled == pytest.approx(c * base, rel=1e-6)


def test_triangle_inequality_on_catalog_laws():
    laws = [
        laplace_handle(LaplaceParams(0.0, 1 / math.sqrt(2.0))),
        normal_handle(1.0),
        laplace_handle(LaplaceParams(0.3, 1.0)),
    ]
    kinks = (0.0, 0.3)

    def d_k(a, b):
        return kolmogorov_exact(a.cdf, b.cdf, -40.0, 40.0, kinks).value

    def d_w(a, b):
        return wasserstein1_cdf(a.cdf, b.cdf, points=kinks).value

    for distance in (d_k, d_w):
        for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
            assert distance(laws[i], laws[k]) <= distance(laws[i], laws[j]) + distance(laws[j], laws[k]) + 1e-8


def test_cf_lower_bound_stays_below_empirical_wasserstein():
    spec = rademacher()
    target = limit_law(spec)
    for i, p in enumerate((0.2, 0.05)):
        sample = simulate_geometric_sum(spec, p, 20_000, seed=31, key=(i,), threads=1)
        _, lower = cf_lower_bounds(geometric_sum_cf(spec, p), target.cf)
        empirical = wasserstein1_empirical(sample, target)
        assert 0 < lower <= empirical.value + empirical.error_bound
