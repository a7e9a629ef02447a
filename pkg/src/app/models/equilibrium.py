"""
Центрированное равновесное преобразование W -> W^L

Закон W^L определяется тождеством E f(W) - f(0) = (1/2) E[W^2] E f''(W^L).
Двукратное интегрирование по частям даёт плотность m(x)/b_X^2, где
b_X^2 = E[X^2]/2, m(x) = E[(X - x)^+] при x >= 0 и m(x) = E[(x - X)^+] при x < 0.
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from ..utils.errors import DomainError, MissingMomentError, QuadratureError
from ..utils.log import get_logger
from ..utils.quadrature import quad_split
from ..utils.rng import run_blocks
from .distributions import geometric_sampler, open_uniform
from .summands import SummandSpec

logger = get_logger(__name__)

TAIL_MASS = 1e-12
QUANTILE_TOL = 1e-10


@dataclass(frozen=True)
class CenteredEquilibrium:
    """Закон X^L для слагаемого X с нулевым средним"""

    base: SummandSpec
    half_second_moment: float
    support: Tuple[float, float]
    # интервал бисекции квантили: носитель без хвостов массы TAIL_MASS
    bracket: Tuple[float, float]

    def _stop_loss(self, x: np.ndarray) -> np.ndarray:
        handle = self.base.handle
        if handle.stop_loss is not None:
            return handle.stop_loss(x)
        hi = self.support[1]

        def tail(v: float) -> float:
            if v >= hi:
                return 0.0
            return quad_split(lambda t: 1.0 - float(handle.cdf(t)), v, hi, handle.atoms)[0]

        return np.vectorize(tail)(x)

    def density(self, x):
        x = np.asarray(x, dtype=float)
        m = self._stop_loss(x)
        # E[(x - X)^+] = x + E[(X - x)^+] при E X = 0
        m = np.where(x >= 0, m, x + m)
        return np.maximum(m, 0.0) / self.half_second_moment

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        lo, hi = self.support
        handle = self.base.handle
        if handle.stop_loss2 is not None:
            s2 = handle.stop_loss2(x)
            two_b2 = 2.0 * self.half_second_moment
            lower = (self.base.sigma2 + x**2 - s2) / two_b2
            out = np.where(x >= 0, 1.0 - s2 / two_b2, lower)
        else:
            out = np.vectorize(self._cdf_by_quadrature)(x)
        out = np.where(x <= lo, 0.0, np.where(x >= hi, 1.0, out))
        return np.clip(out, 0.0, 1.0)

    def _cdf_by_quadrature(self, x: float) -> float:
        lo, hi = self.support
        if x < 0:
            value, _ = quad_split(self.density, lo, x, self.kinks)
        else:
            value, _ = quad_split(self.density, x, hi, self.kinks)
            value = 1.0 - value
        if not np.isfinite(value):
            raise QuadratureError("функция распределения X^L не вычислилась", x)
        return value

    def quantile(self, u):
        """Обобщённая обратная функция векторной бисекцией (точность 1e-10)"""
        u = np.asarray(u, dtype=float)
        lo = np.full(u.shape, self.bracket[0])
        hi = np.full(u.shape, self.bracket[1])
        iterations = int(math.ceil(math.log2(max(hi.max(initial=1.0) - lo.min(initial=0.0), 1.0) / QUANTILE_TOL)))
        for _ in range(iterations):
            mid = 0.5 * (lo + hi)
            below = self.cdf(mid) < u
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        return hi

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.base.equilibrium_fixed:
            return self.base.sample(rng, size)
        return self.quantile(open_uniform(rng, size))

    def moment_by_quadrature(self, r: int, absolute: bool = False) -> float:
        """E[(X^L)^r] или E|X^L|^r интегрированием построенной плотности"""
        lo, hi = self.support
        power = (lambda t: abs(t) ** r) if absolute else (lambda t: t**r)
        value, _ = quad_split(
            lambda t: power(t) * float(self.density(t)),
            lo,
            hi,
            self.kinks,
            epsabs=1e-13,
            epsrel=1e-12,
        )
        return value

    @property
    def kinks(self) -> Tuple[float, ...]:
        lo, hi = self.support
        return (0.0, *(a for a in self.base.handle.atoms if lo < a < hi))


def _essential_support(spec: SummandSpec) -> Tuple[float, float]:
    lo, hi = spec.handle.support
    if not math.isfinite(lo):
        lo = float(spec.handle.quantile(TAIL_MASS))
    if not math.isfinite(hi):
        hi = float(spec.handle.quantile(1.0 - TAIL_MASS))
    return lo, hi


def centered_equilibrium(spec: SummandSpec) -> CenteredEquilibrium:
    """Строит закон X^L для слагаемого spec"""
    if spec.handle.cdf is None:
        raise DomainError(f"{spec.name}: для X^L нужна функция распределения")
    if abs(spec.handle.mean) > 1e-10 * max(1.0, spec.sigma):
        raise DomainError(f"{spec.name}: среднее должно быть нулевым")
    if spec.handle.stop_loss is None:
        logger.warning("%s: stop-loss считается квадратурой", spec.name)
    return CenteredEquilibrium(
        base=spec,
        half_second_moment=spec.sigma2 / 2.0,
        support=spec.handle.support,
        bracket=_essential_support(spec),
    )


def _raw_moment(spec: SummandSpec, order: int) -> float:
    if order == 2:
        return spec.sigma2
    if order == 3 and spec.third_moment is not None:
        return spec.third_moment
    if order == 4 and spec.fourth_moment is not None:
        return spec.fourth_moment
    if spec.handle.raw_moment is None:
        raise MissingMomentError("moml", f"E X^{order}")
    return spec.handle.raw_moment(order)


def equilibrium_moment(spec: SummandSpec, r: int, absolute: bool = False) -> float:
    """E[(X^L)^r] = E[X^{r+2}] / ((r+1)(r+2) b^2), аналогично для |X^L|"""
    if int(r) != r or r < 0:
        raise DomainError(f"порядок момента должен быть целым >= 0, получено {r}")
    b2 = spec.sigma2 / 2.0
    top = spec.rho(r + 2, bound="moml") if absolute else _raw_moment(spec, r + 2)
    return top / ((r + 1) * (r + 2) * b2)


def mean_abs_gap(spec: SummandSpec, equilibrium: Optional[CenteredEquilibrium] = None) -> float:
    """
    E|X - X^L| для независимых X и X^L

    E|X - y| = y + 2 E[(X - y)^+] при E X = 0, остаётся проинтегрировать по плотности X^L.
    """
    eq = equilibrium or centered_equilibrium(spec)
    lo, hi = eq.support

    def integrand(y: float) -> float:
        return (y + 2.0 * float(eq._stop_loss(np.asarray(y)))) * float(eq.density(y))

    value, _ = quad_split(integrand, lo, hi, eq.kinks, epsabs=1e-12, epsrel=1e-10)
    return value


def characterizing_gap(
    spec: SummandSpec,
    f: Callable[[float], float],
    f2: Callable[[float], float],
    equilibrium: Optional[CenteredEquilibrium] = None,
) -> float:
    """E f(X) - f(0) - b_X^2 E f''(X^L); ноль для корректно построенного X^L"""
    eq = equilibrium or centered_equilibrium(spec)
    lo, hi = eq.support
    left = spec.handle.expect(f) - f(0.0)
    right, _ = quad_split(lambda t: f2(t) * float(eq.density(t)), lo, hi, eq.kinks, epsabs=1e-13)
    return left - eq.half_second_moment * right


def quantile_coupling_sup(spec: SummandSpec, start: int = 10, stop: int = 20, tol: float = 1e-4) -> float:
    """
    sup_u |F_X^{-1}(u) - F_{X^L}^{-1}(u)| на диадических сетках 2^start .. 2^stop

    Возвращает math.inf, если супремум не стабилизировался и достигается
    на краю сетки (неограниченный разрыв квантилей).
    """
    eq = centered_equilibrium(spec)
    previous = None
    edge = False
    for level in range(start, stop + 1):
        grid = np.arange(1, 1 << level) / float(1 << level)
        gap = np.abs(np.asarray(spec.handle.quantile(grid), dtype=float) - eq.quantile(grid))
        idx = int(np.argmax(gap))
        current = float(gap[idx])
        edge = idx in (0, grid.size - 1)
        if previous is not None and abs(current - previous) < tol:
            logger.info("%s: sup разрыва квантилей %.6f (сетка 2^%d)", spec.name, current, level)
            return current
        previous = current
    if edge:
        logger.warning("%s: разрыв квантилей растёт к краю носителя", spec.name)
        return math.inf
    logger.warning("%s: сетка 2^%d не сошлась, возвращаю последнее значение", spec.name, stop)
    return float(previous)


@dataclass(frozen=True)
class CouplingSample:
    """Пары (W, W^L) и число слагаемых N для каждой пары"""

    w: np.ndarray
    w_L: np.ndarray
    n: np.ndarray

    def __post_init__(self):
        if not (self.w.shape == self.w_L.shape == self.n.shape):
            raise DomainError("компоненты выборки должны иметь одинаковую длину")

    @property
    def delta(self) -> np.ndarray:
        return self.w - self.w_L

    def __len__(self) -> int:
        return int(self.w.size)


def sample_coupled_geometric(
    spec: SummandSpec,
    p: float,
    count: int,
    seed: int,
    key: tuple = (),
    threads: Optional[int] = None,
) -> CouplingSample:
    """
    Пары S = sqrt(p) sum_{i<=N} X_i и S^L = sqrt(p)(sum_{i<N} X_i + X_N^L)

    X_N^L независима от N и от всех X_k; общие слагаемые X_1..X_{N-1}.
    """
    if not 0 < p < 1:
        raise DomainError(f"p должно лежать в (0, 1), получено p={p}")
    if count < 1:
        raise DomainError(f"число пар должно быть положительным, получено {count}")
    eq = centered_equilibrium(spec)
    scale = math.sqrt(p)

    def block(rng: np.random.Generator, size: int) -> np.ndarray:
        n = geometric_sampler(p, rng, size)
        head = np.zeros(size)
        more = n > 1
        if more.any():
            head[more] = spec.sample_sums(rng, n[more] - 1)
        last = spec.sample(rng, size)
        last_L = eq.sample(rng, size)
        return np.column_stack((scale * (head + last), scale * (head + last_L), n))

    table = run_blocks(block, count, seed, key=key, threads=threads)
    return CouplingSample(w=table[:, 0], w_L=table[:, 1], n=table[:, 2].astype(np.int64))
