"""Проверки неравенств: концентрация, произведения величин, сглаживание индикатора"""

import math
from dataclasses import asdict, dataclass
from typing import Dict, Literal, Optional, Sequence

import numpy as np
from scipy import stats

from ..models.distributions import DistributionHandle, LaplaceParams, laplace_handle
from ..utils.errors import DomainError
from ..utils.log import get_logger
from ..utils.rng import make_rng
from .distances import (
    dkw_radius,
    kolmogorov_empirical,
    kolmogorov_exact,
    wasserstein1_cdf,
)

logger = get_logger(__name__)

ProductMetric = Literal["K", "W", "d12"]
SPAN_MASS = 1e-12


@dataclass(frozen=True)
class CheckResult:
    """Результат проверки lhs <= rhs + slack"""

    name: str
    lhs: float
    rhs: float
    slack: float

    @property
    def passed(self) -> bool:
        return self.lhs <= self.rhs + self.slack

    def to_json(self) -> Dict[str, object]:
        return {**asdict(self), "passed": self.passed}


def concentration_check(
    sample: np.ndarray, laplace: LaplaceParams, alpha: float, beta: float
) -> CheckResult:
    """
    P(alpha <= W <= beta) <= (beta - alpha)/(2b) + 2 d_K(W, Z), Z ~ Laplace(0, b)

    Вероятность и d_K берутся по выборке; запас 4 радиуса DKW покрывает
    ошибку обеих эмпирических величин.
    """
    if alpha > beta:
        raise DomainError(f"нужно alpha <= beta, получено [{alpha}, {beta}]")
    w = np.asarray(sample, dtype=float)
    target = laplace_handle(LaplaceParams(0.0, laplace.b))
    prob = float(np.mean((w >= alpha) & (w <= beta)))
    d_k = kolmogorov_empirical(w, target.cdf)
    rhs = (beta - alpha) / (2.0 * laplace.b) + 2.0 * d_k.value
    return CheckResult("concentration", prob, rhs, 4.0 * d_k.error_bound)


def smoothing_check(
    sample: np.ndarray, b: float, eps: float, a_grid: Optional[Sequence[float]] = None
) -> CheckResult:
    """d_K(W, Z) <= eps/(2b) + sup_a |E h_{a,eps}(W) - E h_{a,eps}(Z)|"""
    if not eps > 0:
        raise DomainError(f"eps должно быть положительным, получено {eps}")
    w = np.sort(np.asarray(sample, dtype=float))
    target = laplace_handle(LaplaceParams(0.0, b))
    grid = np.linspace(-10 * b, 10 * b, 401) if a_grid is None else np.asarray(a_grid, dtype=float)
    # E h_{a,eps}(Z) = (G(a) - G(a - eps))/eps, G - интеграл функции распределения
    smooth_z = (target.integrated_cdf(grid) - target.integrated_cdf(grid - eps)) / eps
    smooth_w = np.array([np.mean(np.clip((a - w) / eps, 0.0, 1.0)) for a in grid])
    d_k = kolmogorov_empirical(w, target.cdf)
    rhs = eps / (2.0 * b) + float(np.max(np.abs(smooth_w - smooth_z)))
    return CheckResult("smoothing", d_k.value, rhs, 2.0 * d_k.error_bound)


def _span(first: DistributionHandle, second: DistributionHandle):
    bounds = []
    for handle in (first, second):
        lo, hi = handle.support
        if not math.isfinite(lo):
            lo = float(handle.quantile(SPAN_MASS))
        if not math.isfinite(hi):
            hi = float(handle.quantile(1.0 - SPAN_MASS))
        bounds.append((lo, hi))
    lo = min(b[0] for b in bounds)
    hi = max(b[1] for b in bounds)
    if hi <= lo:
        hi = lo + 1.0
    return lo - 1e-9, hi + 1e-9


def _exact_kolmogorov(first: DistributionHandle, second: DistributionHandle) -> float:
    lo, hi = _span(first, second)
    return kolmogorov_exact(first.cdf, second.cdf, lo, hi, (*first.atoms, *second.atoms)).value


def _exact_wasserstein(first: DistributionHandle, second: DistributionHandle) -> float:
    lo, hi = _span(first, second)
    return wasserstein1_cdf(first.cdf, second.cdf, lo, hi, (*first.atoms, *second.atoms)).value


def _abs_mean(handle: DistributionHandle) -> float:
    if handle.abs_moment is not None:
        return handle.abs_moment(1)
    return handle.expect(abs)


def _second_moment(handle: DistributionHandle) -> float:
    if handle.raw_moment is not None:
        return handle.raw_moment(2)
    return handle.expect(lambda t: t * t)


def _spread(sample: np.ndarray) -> float:
    """int sqrt(F_n(1 - F_n)) dx по отсортированной выборке"""
    x = np.sort(sample)
    c = np.arange(1, x.size) / x.size
    return float(np.sum(np.sqrt(c * (1 - c)) * np.diff(x)))


def product_metric_check(
    Y1: DistributionHandle,
    Y2: DistributionHandle,
    Z1: DistributionHandle,
    Z2: DistributionHandle,
    metric: ProductMetric = "K",
    count: int = 200_000,
    seed: int = 0,
    d2_upper: Optional[float] = None,
) -> CheckResult:
    """
    Неравенства для произведений независимых величин:

    d_K(Y1 Z1, Y2 Z2) <= d_K(Y1, Y2) + d_K(Z1, Z2)
    d_W(Y1 Z1, Y2 Z2) <= E|Z1| d_W(Y1, Y2) + E|Y2| d_W(Z1, Z2)
    d_12(Y1 Z1, Y2 Z2) <= E|Z1| d_W(Y1, Y2) + E[Y2^2] d_2(Z1, Z2)

    Правая часть считается точно по функциям распределения (d_2 передаётся
    верхней оценкой d2_upper), левая - по выборкам произведений; для d_12
    слева берётся нижняя оценка по эмпирическим х.ф.
    """
    rng = make_rng(seed, 7)
    left = Y1.sample(rng, count) * Z1.sample(rng, count)
    right = Y2.sample(rng, count) * Z2.sample(rng, count)
    if metric == "K":
        lhs = float(stats.ks_2samp(left, right).statistic)
        rhs = _exact_kolmogorov(Y1, Y2) + _exact_kolmogorov(Z1, Z2)
        slack = 2.0 * dkw_radius(count)
    elif metric == "W":
        lhs = float(stats.wasserstein_distance(left, right))
        rhs = _abs_mean(Z1) * _exact_wasserstein(Y1, Y2) + _abs_mean(Y2) * _exact_wasserstein(Z1, Z2)
        slack = 3.0 * (_spread(left) + _spread(right)) / math.sqrt(count)
    elif metric == "d12":
        if d2_upper is None:
            raise DomainError("для d_12 нужна верхняя оценка d_2(Z1, Z2)")
        omegas = np.geomspace(1.0, 10.0, 60)
        delta = np.array([np.exp(1j * w * left).mean() - np.exp(1j * w * right).mean() for w in omegas])
        lhs = float(np.max(np.maximum(np.abs(delta.real), np.abs(delta.imag)) / omegas**2))
        rhs = _abs_mean(Z1) * _exact_wasserstein(Y1, Y2) + _second_moment(Y2) * d2_upper
        slack = 8.0 / math.sqrt(count)
    else:
        raise DomainError(f"неизвестная метрика '{metric}' (доступны: K, W, d12)")
    result = CheckResult(f"product-{metric}", lhs, rhs, slack)
    logger.info("%s: %.5f <= %.5f + %.5f", result.name, lhs, rhs, slack)
    return result
