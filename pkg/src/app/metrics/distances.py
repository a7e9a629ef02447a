"""
Расстояния между законами: Колмогоров, Вассерштейн, нижние оценки d_2 по х.ф.

Точные расстояния считаются по функциям распределения, эмпирические - по
отсортированной выборке против непрерывной функции распределения.
"""

import math
from dataclasses import asdict, dataclass
from typing import Callable, Dict, Iterable, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import optimize

from ..models.distributions import DistributionHandle
from ..utils.errors import DomainError, QuadratureError
from ..utils.log import get_logger
from ..utils.quadrature import quad_split

logger = get_logger(__name__)

ArrayFn = Callable[[np.ndarray], np.ndarray]
ComplexFn = Callable[[np.ndarray], np.ndarray]

DKW_ALPHA = 0.01
GRID_POINTS = 4096
REFINED_PEAKS = 5


@dataclass(frozen=True)
class DistanceEstimate:
    """Значение расстояния и его погрешность (DKW, квадратура или сетка)"""

    value: float
    error_bound: float
    method: str

    def __post_init__(self):
        if self.value < 0 or self.error_bound < 0:
            raise DomainError(f"расстояние и погрешность неотрицательны: {self.value}, {self.error_bound}")

    def to_json(self) -> Dict[str, Union[float, str]]:
        return asdict(self)


def dkw_radius(n: int, alpha: float = DKW_ALPHA) -> float:
    """Радиус доверительной полосы Дворецкого-Кифера-Вольфовица"""
    if n < 1:
        raise DomainError("выборка пуста")
    return math.sqrt(math.log(2.0 / alpha) / (2.0 * n))


def _grid(lo: float, hi: float, points: Iterable[float], size: int) -> np.ndarray:
    extra = []
    for p in points:
        if lo <= p <= hi:
            # левый предел в точке скачка
            extra.extend([np.nextafter(p, -np.inf), p])
    return np.unique(np.concatenate([np.linspace(lo, hi, size), np.asarray(extra, dtype=float)]))


def kolmogorov_exact(
    F1: ArrayFn,
    F2: ArrayFn,
    lo: float,
    hi: float,
    points: Sequence[float] = (),
    size: int = GRID_POINTS,
) -> DistanceEstimate:
    """
    sup_z |F1(z) - F2(z)| на [lo, hi]: сетка и золотое сечение у лучших максимумов

    Args:
        F1, F2: функции распределения (векторные)
        lo, hi: отрезок, вне которого обе функции совпадают с 0 и 1 с нужной точностью
        points: точки скачков или изломов
        size: число узлов равномерной сетки
    """
    if not hi > lo:
        raise DomainError(f"нужно lo < hi, получено [{lo}, {hi}]")

    def gap(z):
        return np.abs(np.asarray(F1(z), dtype=float) - np.asarray(F2(z), dtype=float))

    z = _grid(lo, hi, points, size)
    d = gap(z)
    best = float(d.max())
    interior = np.flatnonzero((d[1:-1] >= d[:-2]) & (d[1:-1] >= d[2:])) + 1
    for i in interior[np.argsort(d[interior])[::-1][:REFINED_PEAKS]]:
        try:
            res = optimize.minimize_scalar(
                lambda t: -float(gap(t)), bracket=(z[i - 1], z[i], z[i + 1]), method="golden"
            )
        except ValueError:
            continue
        if z[i - 1] <= res.x <= z[i + 1]:
            best = max(best, -float(res.fun))
    # оценка пропущенного между узлами пика через модуль непрерывности;
    # интервалы шириной в один ulp у точек скачка не учитываются
    smooth = np.diff(z) > 1e-12 * (hi - lo)
    step = np.abs(np.diff(d))[smooth]
    mid = 0.5 * (d[1:] + d[:-1])[smooth]
    envelope = float(np.max(mid + 0.5 * step.max())) if step.size else best
    return DistanceEstimate(best, max(envelope - best, 0.0), "grid+golden")


def kolmogorov_empirical(sample: np.ndarray, F: ArrayFn, alpha: float = DKW_ALPHA) -> DistanceEstimate:
    """Статистика Колмогорова-Смирнова против непрерывной F; погрешность - радиус DKW"""
    x = np.sort(np.asarray(sample, dtype=float))
    n = x.size
    if n == 0:
        raise DomainError("выборка пуста")
    cdf = np.asarray(F(x), dtype=float)
    i = np.arange(1, n + 1)
    value = max(float(np.max(i / n - cdf)), float(np.max(cdf - (i - 1) / n)), 0.0)
    return DistanceEstimate(value, dkw_radius(n, alpha), "ks")


def wasserstein1_cdf(
    F1: ArrayFn,
    F2: ArrayFn,
    lo: float = -math.inf,
    hi: float = math.inf,
    points: Sequence[float] = (),
) -> DistanceEstimate:
    """int |F1 - F2| dx адаптивной квадратурой с разбиением в точках излома"""
    try:
        value, error = quad_split(
            lambda t: abs(float(F1(t)) - float(F2(t))), lo, hi, (*points, 0.0), epsabs=1e-12
        )
    except QuadratureError as e:
        raise DomainError(f"интеграл |F1 - F2| расходится: первые моменты отсутствуют ({e})") from e
    if error > 1e-3 * max(value, 1.0):
        raise DomainError(f"интеграл |F1 - F2| не сходится (оценка ошибки {error:.3g})")
    return DistanceEstimate(value, error, "quad")


def wasserstein_error_scale(handle: DistributionHandle) -> float:
    """int sqrt(F(1 - F)) dx: масштаб ошибки эмпирического d_W"""
    lo, hi = handle.support

    def integrand(t):
        F = float(handle.cdf(t))
        return math.sqrt(max(F * (1.0 - F), 0.0))

    value, _ = quad_split(integrand, lo, hi, handle.atoms, epsabs=1e-10, epsrel=1e-8)
    return value


def wasserstein1_empirical(sample: np.ndarray, handle: DistributionHandle) -> DistanceEstimate:
    """
    Точный int |F_n - F| dx для эмпирической F_n и непрерывной F

    На [x_(i), x_(i+1)] эмпирическая функция равна c = i/n, а F монотонна,
    поэтому интеграл распадается в точке s = F^{-1}(c) и выражается через
    G(x) = int_{-inf}^x F = x - E X + E[(X - x)^+].
    """
    x = np.sort(np.asarray(sample, dtype=float))
    n = x.size
    if n == 0:
        raise DomainError("выборка пуста")
    if handle.stop_loss is None:
        raise DomainError(f"{handle.name}: для эмпирического d_W нужно stop-loss преобразование")
    G = handle.integrated_cdf
    total = float(G(x[0])) + float(handle.stop_loss(x[-1]))
    if n > 1:
        a, b = x[:-1], x[1:]
        c = np.arange(1, n) / n
        s = np.clip(np.asarray(handle.quantile(c), dtype=float), a, b)
        Ga, Gb, Gs = G(a), G(b), G(s)
        pieces = c * (s - a) - (Gs - Ga) + (Gb - Gs) - c * (b - s)
        total += math.fsum(np.maximum(pieces, 0.0))
    error = 3.0 * wasserstein_error_scale(handle) / math.sqrt(n)
    return DistanceEstimate(total, error, "exact-empirical")


def wasserstein1(first, second, **kwargs) -> DistanceEstimate:
    """d_W: выборка против закона или функция распределения против функции распределения"""
    if isinstance(first, np.ndarray):
        if not isinstance(second, DistributionHandle):
            raise DomainError("для выборки нужен DistributionHandle целевого закона")
        return wasserstein1_empirical(first, second)
    F2 = second.cdf if isinstance(second, DistributionHandle) else second
    F1 = first.cdf if isinstance(first, DistributionHandle) else first
    return wasserstein1_cdf(F1, F2, **kwargs)


def d2_lower_bound_cf(
    phi1: ComplexFn,
    phi2: ComplexFn,
    omegas: Sequence[float],
    lipschitz: bool = False,
) -> float:
    """
    Нижняя оценка d_2 (или d_{1,2} при lipschitz=True) по характеристическим функциям

    Функции -cos(wx)/w^2 и -sin(wx)/w^2 лежат в H_2, поэтому
    max(|Re dphi(w)|, |Im dphi(w)|)/w^2 <= d_2. Для H_{1,2} нужно ещё
    ||h'|| = 1/w <= 1, то есть w >= 1.
    """
    w = np.asarray(omegas, dtype=float)
    if np.any(w == 0):
        raise DomainError("частота w = 0 недопустима")
    w = np.abs(w)
    if lipschitz:
        w = w[w >= 1.0]
        if w.size == 0:
            return 0.0
    delta = np.asarray(phi1(w), dtype=complex) - np.asarray(phi2(w), dtype=complex)
    per_omega = np.maximum(np.abs(delta.real), np.abs(delta.imag)) / w**2
    return float(per_omega.max())


def cf_lower_bounds(
    phi1: ComplexFn, phi2: ComplexFn, omegas: Optional[Sequence[float]] = None
) -> Tuple[float, float]:
    """(нижняя оценка d_2, нижняя оценка d_{1,2}) на стандартной сетке частот"""
    grid = np.geomspace(0.05, 20.0, 400) if omegas is None else omegas
    return d2_lower_bound_cf(phi1, phi2, grid), d2_lower_bound_cf(phi1, phi2, grid, lipschitz=True)
