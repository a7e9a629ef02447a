"""
Уравнение Стейна для chi(k) и рэлеевские константы

x f'(x) + (k - x^2) f(x) = h(x) - E h(K), K ~ chi(k). Решение
f(x) = (1/(x rho_k(x))) int_0^x h~ rho_k  ниже медианы и
f(x) = -(1/(x rho_k(x))) int_x^inf h~ rho_k  выше неё.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, List, Literal, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from ..bounds.printed_constants import (
    C_RAYLEIGH_FPRIME,
    C_RAYLEIGH_XF,
    C_RAYLEIGH_XFPP,
    chi_sup_constant,
)
from ..bounds.report import BoundReport
from ..metrics.distances import DistanceEstimate
from ..models.distributions import ScaledBetaRoot, chi_density, chi_handle, rayleigh_handle
from ..models.specfun import erf
from ..utils.errors import DomainError, QuadratureError
from ..utils.log import get_logger
from ..utils.quadrature import quad_split
from .test_functions import TestFunction

logger = get_logger(__name__)

STEP = 1e-4
NORM_RTOL = 1e-6
NORM_ATOL = 1e-9
RESIDUAL_TOL = 1e-6
X_STAR_TOL = 1e-10

Operator = Literal["rayleigh", "scaled_beta"]


@dataclass(frozen=True)
class ChiSteinSolution:
    """Решение уравнения Стейна для chi(k) с тестовой функцией h"""

    k: float
    h: TestFunction
    mean_h: float
    median: float

    def h_tilde(self, x):
        return np.asarray(self.h(x), dtype=float) - self.mean_h

    def _weight(self, t: float, x: float) -> float:
        """rho_k(t)/rho_k(x) без переполнения в хвостах"""
        return math.exp((self.k - 1.0) * math.log(t / x) - (t * t - x * x) / 2.0)

    def _points(self, lo: float, hi: float) -> List[float]:
        return [p for p in self.h.kinks if lo < p < hi]

    def f_lower(self, x: float) -> float:
        try:
            value, _ = quad_split(
                lambda t: float(self.h_tilde(t)) * self._weight(t, x) if t > 0 else 0.0,
                0.0,
                x,
                self._points(0.0, x),
                epsabs=1e-13,
                epsrel=1e-12,
            )
        except QuadratureError as e:
            raise QuadratureError(f"решение chi({self.k:g}) для {self.h.name}", x) from e
        return value / x

    def f_upper(self, x: float) -> float:
        try:
            value, _ = quad_split(
                lambda t: float(self.h_tilde(t)) * self._weight(t, x),
                x,
                math.inf,
                self._points(x, math.inf),
                epsabs=1e-13,
                epsrel=1e-12,
            )
        except QuadratureError as e:
            raise QuadratureError(f"решение chi({self.k:g}) для {self.h.name}", x) from e
        return -value / x

    def _f_scalar(self, x: float, upper: Optional[bool] = None) -> float:
        if not x > 0:
            raise DomainError(f"решение определено при x > 0, получено {x}")
        if upper is None:
            upper = x > self.median
        return self.f_upper(x) if upper else self.f_lower(x)

    def f(self, x) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return np.array([self._f_scalar(float(t)) for t in x])

    def f1(self, x) -> np.ndarray:
        """f' = (h~ - (k - x^2) f)/x прямо из уравнения"""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return (self.h_tilde(x) - (self.k - x**2) * self.f(x)) / x

    def xf2(self, x) -> np.ndarray:
        """
        x f'' из продифференцированного уравнения
        x f'' + (k + 1 - x^2) f' = h' + 2x f; без h' - центральная разность f'
        """
        x = np.atleast_1d(np.asarray(x, dtype=float))
        f = self.f(x)
        f1 = (self.h_tilde(x) - (self.k - x**2) * f) / x
        if self.h.d1 is not None:
            return np.asarray(self.h.d1(x), dtype=float) + 2 * x * f - (self.k + 1 - x**2) * f1
        delta = np.minimum(STEP, x / 4)
        return x * (self.f1(x + delta) - self.f1(x - delta)) / (2 * delta)

    def residual(self, x) -> np.ndarray:
        """
        |x f' + (k - x^2) f - h~| с f' из центральной разности

        Все три точки разности берутся из одной формы решения.
        """
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.empty_like(x)
        for i, t in enumerate(x):
            upper = t > self.median
            d = min(STEP, t / 4)
            up, mid, down = (self._f_scalar(t + s, upper) for s in (d, 0.0, -d))
            fd = (up - down) / (2 * d)
            out[i] = abs(t * fd + (self.k - t * t) * mid - float(self.h_tilde(t)))
        return out


def chi_expectation(h: TestFunction, k: float) -> float:
    """E h(K), K ~ chi(k)"""
    value, _ = quad_split(
        lambda t: float(h(t)) * float(chi_density(t, k)),
        0.0,
        math.inf,
        (math.sqrt(k), *(p for p in h.kinks if p > 0)),
        epsabs=1e-13,
        epsrel=1e-12,
    )
    return value


def chi_stein_solve(h: TestFunction, k: float) -> ChiSteinSolution:
    """Решение уравнения Стейна для chi(k)"""
    if not k > 0:
        raise DomainError(f"число степеней свободы должно быть положительным, получено {k}")
    median = float(chi_handle(k).quantile(0.5))
    return ChiSteinSolution(k=k, h=h, mean_h=chi_expectation(h, k), median=median)


def schoutens_M(k: float) -> float:
    """M = max{F(m), 1 - F(m)} / (m rho_k(m)), m = sqrt(k)"""
    if not k > 0:
        raise DomainError(f"число степеней свободы должно быть положительным, получено {k}")
    m = math.sqrt(k)
    F = float(chi_handle(k).cdf(m))
    return max(F, 1.0 - F) / (m * float(chi_density(m, k)))


def bound10(k: float) -> float:
    """Равномерная константа ||f|| <= Г(k/2) e^{k/2} / (2 (k/2)^{k/2}) ||h~||"""
    if not k > 0:
        raise DomainError(f"число степеней свободы должно быть положительным, получено {k}")
    return chi_sup_constant(k)


def rayleigh_integrals(x) -> Tuple[np.ndarray, np.ndarray]:
    """
    I_1(x) = int_0^x (sqrt(pi/2) + t) rho_R(t) dt и I_2(x) = int_x^inf (...)

    rho_R(t) = t e^{-t^2/2}; оба интеграла выражаются через erf.
    """
    x = np.asarray(x, dtype=float)
    a = math.sqrt(math.pi / 2)
    e = np.exp(-(x**2) / 2)
    r = erf(x / math.sqrt(2.0))
    i1 = a * (1 - e) + a * r - x * e
    i2 = a * (1 + e) - a * r + x * e
    return i1, i2


def rayleigh_envelopes(x) -> Tuple[np.ndarray, np.ndarray]:
    """(I_1/rho_R, I_2/rho_R): верхние оценки |x f(x)| / ||h'|| слева и справа"""
    x = np.asarray(x, dtype=float)
    i1, i2 = rayleigh_integrals(x)
    rho = x * np.exp(-(x**2) / 2)
    return i1 / rho, i2 / rho


@dataclass(frozen=True)
class RayleighConstants:
    """Точка пересечения x* и константы оценок для Рэлея (sigma = 1)"""

    x_star: float
    c_xf: float
    c_fprime: float
    c_xfpp: float

    def to_json(self) -> Dict[str, float]:
        return {
            "x_star": round(self.x_star, 10),
            "c_xf": float(f"{self.c_xf:.6g}"),
            "c_fprime": float(f"{self.c_fprime:.6g}"),
            "c_xfpp": float(f"{self.c_xfpp:.6g}"),
        }


@lru_cache(maxsize=None)
def rayleigh_constants() -> RayleighConstants:
    """x* из I_1(x) = I_2(x) бисекцией на (0.5, 3), затем 2.325, 6.11 и 11.30"""

    def gap(x: float) -> float:
        i1, i2 = rayleigh_integrals(x)
        return float(i1 - i2)

    assert gap(0.5) < 0 < gap(3.0), "I_1 - I_2 не меняет знак на (0.5, 3)"
    x_star = optimize.bisect(gap, 0.5, 3.0, xtol=X_STAR_TOL)
    c_xf = float(rayleigh_envelopes(x_star)[0])
    c_fprime = bound10(3.0) * (1 + 2 * c_xf)
    c_xfpp = 2 * (1 + 2 * c_xf)
    logger.info("x* = %.8f, c_xf = %.6f, c_fprime = %.6f, c_xfpp = %.6f", x_star, c_xf, c_fprime, c_xfpp)
    return RayleighConstants(x_star=x_star, c_xf=c_xf, c_fprime=c_fprime, c_xfpp=c_xfpp)


def rayleigh_bound_constants(sigma: float) -> Dict[str, float]:
    """Константы оценок решения для Rayleigh(sigma) в напечатанном виде"""
    if not sigma > 0:
        raise DomainError(f"sigma должна быть положительной, получено {sigma}")
    return {
        "bound1": math.e / (2 * sigma**2),
        "bound2": 2 / sigma**2,
        "bound3": C_RAYLEIGH_XF / sigma,
        "bound4": C_RAYLEIGH_FPRIME / sigma**3,
        "bound5": C_RAYLEIGH_XFPP / sigma**3,
    }


def rayleigh_operator(f: Callable, f1: Callable, sigma: float = 1 / math.sqrt(2.0)) -> Callable:
    """A f = x f' + (2 - x^2/sigma^2) f: оператор Стейна Rayleigh(sigma), делённый на sigma^2"""
    s2 = sigma**2
    return lambda x: x * f1(x) + (2 - x * x / s2) * f(x)


def scaled_beta_operator(f: Callable, f1: Callable, n: int) -> Callable:
    """A f = x(1 - x^2/n) f' + (2 - 2x^2) f для U_n"""
    return lambda x: x * (1 - x * x / n) * f1(x) + (2 - 2 * x * x) * f(x)


def operator_mean_zero_check(
    which: Operator,
    f: Callable[[float], float],
    f1: Callable[[float], float],
    n: Optional[int] = None,
    sigma: float = 1 / math.sqrt(2.0),
) -> float:
    """
    E[A f] по точной плотности; для оператора Стейна это ноль

    Args:
        which: rayleigh (по умолчанию U с плотностью 2x e^{-x^2}) или scaled_beta (U_n)
        f, f1: функция и её производная
        n: параметр U_n для scaled_beta
        sigma: параметр Рэлея
    """
    if which == "rayleigh":
        law = rayleigh_handle(sigma)
        op = rayleigh_operator(f, f1, sigma)
        lo, hi = 0.0, math.inf
    elif which == "scaled_beta":
        if n is None:
            raise DomainError("для U_n нужно указать n")
        beta = ScaledBetaRoot(n)
        law = beta.handle()
        op = scaled_beta_operator(f, f1, n)
        lo, hi = 0.0, math.sqrt(n)
    else:
        raise DomainError(f"неизвестный оператор '{which}' (доступны: rayleigh, scaled_beta)")
    value, _ = quad_split(
        lambda t: float(op(t)) * float(law.density(t)), lo, hi, epsabs=1e-13, epsrel=1e-12
    )
    return value


def _grid_report(name: str, observed: float, bound: float, h: TestFunction, k: float) -> BoundReport:
    estimate = DistanceEstimate(abs(float(observed)), NORM_RTOL * bound + NORM_ATOL, "grid")
    return BoundReport(name=name, inputs={"h": h.name, "k": k}, bound=bound, empirical=estimate, metric="norm")


def verify_chi_bounds(
    h: TestFunction, k: float, grid: Optional[Sequence[float]] = None
) -> List[BoundReport]:
    """
    Оценки решения chi(k) на сетке

    Ограниченная h: ||f|| <= M ||h~||, ||f|| <= C(k) ||h~||, ||x f'|| <= 2 ||h~||.
    При k = 2 и липшицевой h: ||x f|| <= 2.325 ||h'||, ||f'|| <= 6.11 ||h'||,
    ||x f''|| <= 11.30 ||h'||. Плюс невязка уравнения.
    """
    x = np.linspace(0.05, 6.0, 240) if grid is None else np.asarray(grid, dtype=float)
    if x.size == 0:
        raise DomainError("сетка пуста")
    if np.any(x <= 0):
        raise DomainError("сетка должна лежать в (0, inf)")
    solution = chi_stein_solve(h, k)
    f = solution.f(x)
    h_tilde = solution.h_tilde(x)
    f1 = (h_tilde - (k - x**2) * f) / x

    reports: List[BoundReport] = []
    if h.bounded:
        norm = h.tilde_norm(solution.mean_h)
        reports += [
            _grid_report("bdd1", np.max(np.abs(f)), schoutens_M(k) * norm, h, k),
            _grid_report("bound10", np.max(np.abs(f)), bound10(k) * norm, h, k),
            _grid_report("bound20", np.max(np.abs(x * f1)), 2 * norm, h, k),
        ]
    if k == 2 and h.lipschitz:
        reports += [
            _grid_report("bound3", np.max(np.abs(x * f)), C_RAYLEIGH_XF * h.lip, h, k),
            _grid_report("bound4", np.max(np.abs(f1)), C_RAYLEIGH_FPRIME * h.lip, h, k),
            _grid_report("bound5", np.max(np.abs(solution.xf2(x))), C_RAYLEIGH_XFPP * h.lip, h, k),
        ]
    kinks = np.asarray(h.kinks, dtype=float)
    smooth = np.ones_like(x, dtype=bool)
    if kinks.size:
        smooth = np.min(np.abs(x[:, None] - kinks[None, :]), axis=1) > 2 * STEP
    scale = np.maximum(1.0, np.abs(h_tilde))
    residual = solution.residual(x[smooth]) / scale[smooth]
    reports.append(
        BoundReport(
            name="chi-residual",
            inputs={"h": h.name, "k": k},
            bound=RESIDUAL_TOL,
            empirical=DistanceEstimate(float(residual.max(initial=0.0)), 0.0, "finite-difference"),
            metric="residual",
        )
    )
    failed = [r.name for r in reports if not r.satisfied]
    if failed:
        logger.warning("%s, k=%g: нарушены %s", h.name, k, ", ".join(failed))
    return reports
