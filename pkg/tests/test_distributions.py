import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from app.models.distributions import (
    LaplaceParams,
    ScaledBetaRoot,
    beta_one_sampler,
    chi_handle,
    compound_geometric_cf,
    geometric_inverse_mean,
    geometric_sampler,
    laplace_handle,
    normal_handle,
    rayleigh_handle,
    scaled_beta_root_moment,
)
from app.utils.errors import DomainError
from app.utils.rng import make_rng


def test_laplace_basic_values():
    law = laplace_handle(LaplaceParams(0.0, 2.0))
    assert float(law.cdf(0.0)) == pytest.approx(0.5)
    assert law.raw_moment(2) == pytest.approx(8.0)
    assert law.abs_moment(1) == pytest.approx(2.0)
    assert complex(law.cf(0.0)) == pytest.approx(1.0)
    # G(0) = int_{-inf}^0 F = b/2
    assert float(law.integrated_cdf(0.0)) == pytest.approx(1.0)


def test_laplace_params_reject_nonpositive_scale():
    with pytest.raises(DomainError):
        LaplaceParams(0.0, 0.0)


@settings(max_examples=50, deadline=None)
@given(x=st.floats(-30.0, 30.0), b=st.floats(0.2, 5.0))
def test_laplace_quantile_inverts_cdf(x, b):
    law = laplace_handle(LaplaceParams(0.0, b))
    u = float(law.cdf(x))
    if 1e-6 < u < 1 - 1e-6:
        assert float(law.quantile(u)) == pytest.approx(x, abs=1e-6 * max(1.0, abs(x)))


def test_laplace_stop_loss_matches_quadrature():
    law = laplace_handle(LaplaceParams(0.0, 0.7))
    for x in (-1.5, 0.0, 0.8):
        direct = law.expect(lambda t: max(t - x, 0.0))
        assert float(law.stop_loss(x)) == pytest.approx(direct, abs=1e-9)


def test_normal_moments():
    law = normal_handle(2.0)
    assert law.raw_moment(4) == pytest.approx(3 * 16.0)
    assert law.abs_moment(1) == pytest.approx(2.0 * math.sqrt(2 / math.pi))


def test_rayleigh_mixing_law():
    u = rayleigh_handle(1 / math.sqrt(2.0))
    assert float(u.cdf(1.0)) == pytest.approx(1 - math.exp(-1.0))
    assert u.raw_moment(1) == pytest.approx(math.sqrt(math.pi) / 2)
    assert u.raw_moment(2) == pytest.approx(1.0)


def test_chi_two_is_rayleigh_one():
    chi = chi_handle(2.0)
    ray = rayleigh_handle(1.0)
    x = np.linspace(0.1, 4.0, 9)
    assert np.allclose(chi.cdf(x), ray.cdf(x))
    assert float(chi.quantile(0.5)) == pytest.approx(math.sqrt(2 * math.log(2.0)))
    assert chi.expect(lambda t: 1.0) == pytest.approx(1.0, abs=1e-9)


def test_scaled_beta_root_moments():
    for n in (2, 3, 10, 200):
        un = ScaledBetaRoot(n)
        assert un.moment(2) == 1.0
        assert un.moment(4) == pytest.approx(2 * n / (n + 1))
        assert un.moment(1) == pytest.approx(un.handle().expect(lambda t: t), rel=1e-8)
        assert un.moment(3) == pytest.approx(un.handle().expect(lambda t: t**3), rel=1e-8)


def test_scaled_beta_root_rejects_bad_arguments():
    with pytest.raises(DomainError):
        ScaledBetaRoot(1)
    with pytest.raises(DomainError):
        scaled_beta_root_moment(5, 6)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(2, 60), v=st.floats(0.001, 0.999))
def test_scaled_beta_root_quantile_inverts_cdf(n, v):
    un = ScaledBetaRoot(n)
    u = float(un.quantile(v))
    assert 0 < u < math.sqrt(n)
    assert float(un.cdf(u)) == pytest.approx(v, abs=1e-10)


def test_beta_one_sampler_mean():
    draws = beta_one_sampler(4.0)(make_rng(11), 200_000)
    assert draws.min() > 0 and draws.max() < 1
    assert draws.mean() == pytest.approx(1 / 5, abs=3e-3)


def test_geometric_sampler_support_and_mean():
    draws = geometric_sampler(0.1, make_rng(5), 200_000)
    assert draws.min() >= 1
    assert draws.mean() == pytest.approx(10.0, abs=0.15)
    assert isinstance(geometric_sampler(0.5, make_rng(5)), int)


def test_geometric_sampler_rejects_bad_p():
    with pytest.raises(DomainError):
        geometric_sampler(1.0, make_rng(0), 10)


def test_geometric_inverse_mean_matches_series():
    p = 0.1
    n = np.arange(1, 5000)
    series = np.sum(p * (1 - p) ** (n - 1) / n)
    assert geometric_inverse_mean(p) == pytest.approx(series, rel=1e-12)


def test_compound_geometric_cf_keeps_laplace_fixed():
    b = 1 / math.sqrt(2.0)
    law = laplace_handle(LaplaceParams(0.0, b))
    phi = compound_geometric_cf(law.cf, 0.05)
    t = np.linspace(-5.0, 5.0, 21)
    assert np.allclose(phi(t), law.cf(t), atol=1e-12)
