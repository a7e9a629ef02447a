import math

import numpy as np
import pytest

from app.bounds.evaluators import DeltaStats
from app.experiments.coupling import binned_conditional_abs_mean, coupling_statistics
from app.experiments.simulation import (
    geometric_sum_cf,
    limit_law,
    second_moment_check,
    second_moment_report,
    simulate_geometric_sum,
    simulate_tn,
    tn_cf,
)
from app.memory.report_table import ReportTable
from app.metrics.distances import dkw_radius, kolmogorov_empirical
from app.models.summands import laplace_summand, normal_summand, rademacher
from app.utils.errors import BoundViolation, DomainError
from app.utils.rng import make_rng


def test_limit_law_scale():
    law = limit_law(rademacher(2.0))
    assert float(law.cdf(math.sqrt(2.0))) == pytest.approx(1 - 0.5 * math.exp(-1.0))


def test_geometric_sum_sample_is_sorted_and_reproducible():
    one = simulate_geometric_sum(rademacher(), 0.1, 70_000, seed=5, threads=1)
    many = simulate_geometric_sum(rademacher(), 0.1, 70_000, seed=5, threads=3)
    assert np.all(np.diff(one) >= 0)
    assert np.array_equal(one, many)
    assert second_moment_check(one, 1.0)


def test_tn_second_moment():
    sample = simulate_tn(rademacher(), 5, 50_000, seed=8, threads=1)
    assert sample.size == 50_000
    assert second_moment_check(sample, 1.0)


def test_second_moment_check_flags_wrong_variance():
    sample = make_rng(1).standard_normal(50_000)
    assert not second_moment_check(sample, 2.0)


def test_samplers_reject_bad_parameters():
    with pytest.raises(DomainError):
        simulate_geometric_sum(rademacher(), 0.0, 10, seed=0, threads=1)
    with pytest.raises(DomainError):
        simulate_tn(rademacher(), 1, 10, seed=0, threads=1)


def test_geometric_sum_cf_of_laplace_summand_is_the_limit():
    spec = laplace_summand()
    t = np.linspace(-4.0, 4.0, 9)
    assert np.allclose(geometric_sum_cf(spec, 0.2)(t), limit_law(spec).cf(t), atol=1e-12)


def test_tn_cf_normal_summand():
    # n = 2: B_1 ~ U(0, 1), phi(t) = int_0^1 exp(-t^2 x) dx
    phi = tn_cf(normal_summand(), 2)
    t = 1.3
    assert complex(phi(t)[0]) == pytest.approx((1 - math.exp(-(t**2))) / t**2, abs=1e-9)
    assert complex(phi(0.0)[0]) == pytest.approx(1.0)


def test_binned_conditional_mean_of_constant():
    s = np.linspace(0.0, 1.0, 1024)
    values = np.full(1024, 2.0)
    estimate = binned_conditional_abs_mean(s, values, make_rng(0), bins=16, resamples=10)
    assert estimate.value == pytest.approx(2.0)
    assert estimate.se == pytest.approx(0.0, abs=1e-12)
    shifted = binned_conditional_abs_mean(s, values, make_rng(0), bins=16, resamples=10, shift=2.0)
    assert shifted.value == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(DomainError):
        binned_conditional_abs_mean(s[:8], values[:8], make_rng(0), bins=16)


def test_coupling_statistics_rademacher():
    p = 0.05
    betas = (0.05, 0.1)
    stats = coupling_statistics(rademacher(), p, 20_000, seed=12, beta_grid=betas, threads=1, resamples=20)
    assert stats.count == 20_000
    assert set(stats.tail) == set(betas)
    assert stats.sq_mean_theory == pytest.approx(p * (1 + 1 / 6))
    assert abs(stats.sq_mean.value - stats.sq_mean_theory) <= 5 * stats.sq_mean.se
    assert stats.abs_moments[2] == pytest.approx(stats.sq_mean.value)
    assert abs(stats.equilibrium_mean.value) <= 5 * stats.equilibrium_mean.se
    assert stats.sum_L.size == 20_000
    delta = stats.delta_stats(0.1, k=1)
    assert isinstance(delta, DeltaStats)
    assert delta.tail == stats.tail[0.1]
    assert delta.abs_moment_k == stats.abs_moments[1]


def test_coupling_statistics_rejects_bad_input():
    with pytest.raises(DomainError):
        coupling_statistics(rademacher(), 0.1, 1000, seed=0, beta_grid=(0.0,), threads=1)
    with pytest.raises(DomainError):
        coupling_statistics([rademacher()], 0.1, 1000, seed=0, threads=1)


def test_second_moment_report_flags_wrong_variance():
    sample = make_rng(1).standard_normal(50_000)
    report = second_moment_report(sample, 2.0)
    assert report.name == "wald"
    assert report.metric == "moment"
    assert report.satisfied is False
    with pytest.raises(BoundViolation):
        report.require()
    assert second_moment_report(sample, 1.0).satisfied is True
    with pytest.raises(DomainError):
        second_moment_report(np.array([1.0]), 1.0)


@pytest.mark.parametrize("p,b", [(0.5, 0.5), (0.2, 1.0), (0.05, 2.0)])
def test_geometric_sum_of_laplace_summands_stays_laplace(p, b):
    spec = laplace_summand(b)
    count = 20_000
    sample = simulate_geometric_sum(spec, p, count, seed=31, threads=1)
    estimate = kolmogorov_empirical(sample, limit_law(spec).cdf)
    assert estimate.value <= dkw_radius(count, 1e-4)


def test_failed_wald_row_is_a_table_violation():
    sample = make_rng(2).standard_normal(20_000)
    table = ReportTable()
    table.add_report(0.1, second_moment_report(sample, 2.0))
    table.add_report(0.1, second_moment_report(sample, 1.0))
    assert [row["bound_tag"] for row in table.violations()] == ["wald"]
