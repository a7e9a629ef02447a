"""Статистики разности Delta = S - S^L для геометрической суммы"""

import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from ..bounds.evaluators import DeltaStats
from ..models.equilibrium import centered_equilibrium, equilibrium_moment, sample_coupled_geometric
from ..models.summands import SummandSpec
from ..utils.errors import DomainError
from ..utils.log import get_logger
from ..utils.rng import make_rng

logger = get_logger(__name__)

BINS = 256
RESAMPLES = 200


@dataclass(frozen=True)
class Estimate:
    """Оценка и её стандартная ошибка"""

    value: float
    se: float


@dataclass(frozen=True)
class CouplingStatistics:
    """
    Оценки по парам (S, S^L)

    Args:
        p: параметр геометрического числа слагаемых
        count: число пар
        abs_mean: E|Delta|
        sq_mean: E[Delta^2]
        sq_mean_theory: p (sigma^2 + E X^4/(6 sigma^2))
        tail: beta -> P(|Delta| > beta)
        cond_mean_binned: E|E[Delta | S]| по средним Delta в равных по массе корзинах
        cond_mean_route: то же через E[S/N | S] - sqrt(p) E X^L
        equilibrium_mean: выборочное среднее X^L
    """

    p: float
    count: int
    abs_mean: Estimate
    sq_mean: Estimate
    sq_mean_theory: Optional[float]
    tail: Dict[float, float]
    cond_mean_binned: Estimate
    cond_mean_route: Estimate
    equilibrium_mean: Estimate
    abs_moments: Dict[int, float] = field(default_factory=dict)
    # отсортированная выборка S^L
    sum_L: np.ndarray = field(default_factory=lambda: np.empty(0), repr=False, compare=False)

    def delta_stats(self, beta: Optional[float] = None, k: Optional[int] = None) -> DeltaStats:
        """Статистики в виде, который принимает coupling_bounds"""
        return DeltaStats(
            abs_mean=self.abs_mean.value,
            sq_mean=self.sq_mean.value,
            tail=None if beta is None else self.tail.get(beta),
            cond_mean=self.cond_mean_binned.value,
            abs_moment_k=None if k is None else self.abs_moments.get(k),
        )


def _mean(values: np.ndarray) -> Estimate:
    return Estimate(float(values.mean()), float(values.std(ddof=1) / math.sqrt(values.size)))


def _bin_ids(s: np.ndarray, bins: int) -> np.ndarray:
    """Номер корзины равной массы для каждого значения s"""
    order = np.argsort(s, kind="stable")
    ids = np.empty(s.size, dtype=np.int64)
    ids[order] = np.arange(s.size) * bins // s.size
    return ids


def _binned_abs_mean(ids: np.ndarray, values: np.ndarray, bins: int, shift: float = 0.0) -> float:
    counts = np.bincount(ids, minlength=bins)
    sums = np.bincount(ids, weights=values, minlength=bins)
    full = counts > 0
    means = sums[full] / counts[full] - shift
    return float(np.sum(np.abs(means) * counts[full]) / counts[full].sum())


def binned_conditional_abs_mean(
    s: np.ndarray,
    values: np.ndarray,
    rng: np.random.Generator,
    bins: int = BINS,
    resamples: int = RESAMPLES,
    shift: float = 0.0,
) -> Estimate:
    """
    E|E[V | S] - shift| по корзинам равной массы S; ошибка - бутстреп по парам

    Корзины фиксируются по исходной выборке, бутстреп переразыгрывает пары.
    """
    s = np.asarray(s, dtype=float)
    values = np.asarray(values, dtype=float)
    if s.size < bins:
        raise DomainError(f"нужно не меньше {bins} пар, получено {s.size}")
    ids = _bin_ids(s, bins)
    value = _binned_abs_mean(ids, values, bins, shift)
    boot = np.empty(resamples)
    for i in range(resamples):
        idx = rng.integers(0, s.size, s.size)
        boot[i] = _binned_abs_mean(ids[idx], values[idx], bins, shift)
    return Estimate(value, float(boot.std(ddof=1)))


def coupling_statistics(
    spec: SummandSpec,
    p: float,
    count: int,
    seed: int,
    beta_grid: Sequence[float] = (0.05, 0.1, 0.2),
    moments: Tuple[int, ...] = (1, 2, 3),
    key: tuple = (),
    threads: Optional[int] = None,
    bins: int = BINS,
    resamples: int = RESAMPLES,
) -> CouplingStatistics:
    """
    Оценки E|Delta|, E[Delta^2], P(|Delta| > beta), E|E[Delta | S]| по count парам

    E[Delta | S] оценивается дважды: напрямую по корзинам и через
    E[Delta | S] = E[S/N | S] - sqrt(p) E X^L (слагаемые одинаково распределены,
    X_N^L независима от S).
    """
    if not isinstance(spec, SummandSpec):
        raise DomainError("статистики считаются для одинаково распределённых слагаемых: нужен один SummandSpec")
    if any(not b > 0 for b in beta_grid):
        raise DomainError("все beta должны быть положительными")
    sample = sample_coupled_geometric(spec, p, count, seed, key=key, threads=threads)
    delta = sample.delta
    abs_delta = np.abs(delta)
    s2 = spec.sigma2
    theory = None if spec.fourth_moment is None else p * (s2 + spec.fourth_moment / (6 * s2))
    rng = make_rng(seed, *key, 1)
    binned = binned_conditional_abs_mean(sample.w, delta, rng, bins, resamples)
    eq_mean = equilibrium_moment(spec, 1) if spec.third_moment is not None else 0.0
    route = binned_conditional_abs_mean(
        sample.w, sample.w / sample.n, rng, bins, resamples, shift=math.sqrt(p) * eq_mean
    )
    eq_draws = centered_equilibrium(spec).sample(make_rng(seed, *key, 2), min(count, 1 << 18))
    stats = CouplingStatistics(
        p=p,
        count=len(sample),
        abs_mean=_mean(abs_delta),
        sq_mean=_mean(delta**2),
        sq_mean_theory=theory,
        tail={float(b): float(np.mean(abs_delta > b)) for b in beta_grid},
        cond_mean_binned=binned,
        cond_mean_route=route,
        equilibrium_mean=_mean(eq_draws),
        abs_moments={k: float(np.mean(abs_delta**k)) for k in moments},
        sum_L=np.sort(sample.w_L),
    )
    logger.info(
        "p=%g: E|D|=%.3e, E D^2=%.3e (теория %s), E|E[D|S]|=%.3e / %.3e",
        p,
        stats.abs_mean.value,
        stats.sq_mean.value,
        "-" if theory is None else f"{theory:.3e}",
        binned.value,
        route.value,
    )
    return stats
