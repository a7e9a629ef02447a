"""Сэмплеры S_p = sqrt(p) sum_{i<=N} X_i и T_n = B_{n-1}^{1/2} sum_{i<=n} X_i"""

import math
from typing import Optional

import numpy as np

from ..bounds.report import BoundReport
from ..metrics.distances import DistanceEstimate
from ..models.distributions import (
    DistributionHandle,
    LaplaceParams,
    beta_one_sampler,
    compound_geometric_cf,
    geometric_sampler,
    laplace_handle,
)
from ..models.summands import SummandSpec
from ..utils.errors import DomainError
from ..utils.log import get_logger
from ..utils.quadrature import quad_split
from ..utils.rng import run_blocks

logger = get_logger(__name__)

MOMENT_METRIC = "moment"


def limit_law(spec: SummandSpec) -> DistributionHandle:
    """Laplace(0, sigma/sqrt(2)) - предел S_p и T_n"""
    return laplace_handle(LaplaceParams(0.0, spec.sigma / math.sqrt(2.0)))


def simulate_geometric_sum(
    spec: SummandSpec,
    p: float,
    count: int,
    seed: int,
    key: tuple = (),
    threads: Optional[int] = None,
) -> np.ndarray:
    """count независимых значений S_p, отсортированных по возрастанию"""
    if not 0 < p < 1:
        raise DomainError(f"p должно лежать в (0, 1), получено p={p}")
    scale = math.sqrt(p)

    def block(rng: np.random.Generator, size: int) -> np.ndarray:
        n = geometric_sampler(p, rng, size)
        return scale * spec.sample_sums(rng, n)

    return np.sort(run_blocks(block, count, seed, key=key, threads=threads))


def simulate_tn(
    spec: SummandSpec,
    n: int,
    count: int,
    seed: int,
    key: tuple = (),
    threads: Optional[int] = None,
) -> np.ndarray:
    """count независимых значений T_n, B_{n-1} ~ Beta(1, n-1) независима от X_i; по возрастанию"""
    if int(n) != n or n < 2:
        raise DomainError(f"n должно быть целым >= 2, получено n={n}")
    beta = beta_one_sampler(n - 1)

    def block(rng: np.random.Generator, size: int) -> np.ndarray:
        b = beta(rng, size)
        sums = spec.sample_sums(rng, np.full(size, n, dtype=np.int64))
        return np.sqrt(b) * sums

    return np.sort(run_blocks(block, count, seed, key=key, threads=threads))


def geometric_sum_cf(spec: SummandSpec, p: float):
    """Характеристическая функция S_p"""
    if spec.handle.cf is None:
        raise DomainError(f"{spec.name}: характеристическая функция не задана")
    return compound_geometric_cf(spec.handle.cf, p)


def tn_cf(spec: SummandSpec, n: int):
    """phi_{T_n}(t) = int_0^1 phi_X(t sqrt(x))^n (n-1)(1-x)^{n-2} dx"""
    if spec.handle.cf is None:
        raise DomainError(f"{spec.name}: характеристическая функция не задана")
    cf = spec.handle.cf

    def weight(x: float) -> float:
        return (n - 1) * (1.0 - x) ** (n - 2)

    def one(t: float) -> complex:
        def value(x: float) -> complex:
            return complex(np.asarray(cf(t * math.sqrt(x)))) ** n * weight(x)

        re, _ = quad_split(lambda x: value(x).real, 0.0, 1.0, epsabs=1e-12, epsrel=1e-10)
        im, _ = quad_split(lambda x: value(x).imag, 0.0, 1.0, epsabs=1e-12, epsrel=1e-10)
        return complex(re, im)

    def phi(t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return np.array([one(float(v)) for v in t])

    return phi


def second_moment_report(sample: np.ndarray, sigma2: float, tolerance: float = 4.0) -> BoundReport:
    """
    Контроль сэмплера по тождеству Вальда E W^2 = sigma^2

    Строка wald: эмпирическая часть |mean(W^2) - sigma^2|, оценка tolerance * SE.
    """
    squares = np.asarray(sample, dtype=float) ** 2
    if squares.size < 2:
        raise DomainError("для контроля второго момента нужно не меньше двух значений")
    se = float(squares.std(ddof=1) / math.sqrt(squares.size))
    gap = abs(float(squares.mean()) - sigma2)
    report = BoundReport(
        "wald",
        {"sigma2": sigma2, "count": int(squares.size), "mean": float(squares.mean())},
        tolerance * se,
        empirical=DistanceEstimate(gap, 0.0, "sample"),
        metric=MOMENT_METRIC,
        note="guard",
    )
    if not report.satisfied:
        logger.warning("второй момент выборки %.6f, ожидалось %.6f (SE %.2e)", squares.mean(), sigma2, se)
    return report


def second_moment_check(sample: np.ndarray, sigma2: float, tolerance: float = 4.0) -> bool:
    """E W^2 = sigma^2 в пределах tolerance стандартных ошибок"""
    return bool(second_moment_report(sample, sigma2, tolerance).satisfied)
