"""
Уравнение Стейна для Laplace(0, b): b^2 f''(x) - f(x) = h~(x), f(0) = 0

Ограниченное решение выражается через два экспоненциально взвешенных интеграла
I+(x) = int_0^inf e^{-u/b} h~(x + u) du и I-(x) = int_0^inf e^{-u/b} h~(x - u) du:
f = s (I+ + I-)/(2b), f' = s (I+ - I-)/(2b^2), где знак s определяется один раз
по невязке уравнения.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..bounds.report import BoundReport
from ..metrics.distances import DistanceEstimate
from ..utils.errors import DomainError, QuadratureError
from ..utils.log import get_logger
from ..utils.quadrature import quad_split
from .test_functions import TestFunction, sine

logger = get_logger(__name__)

# хвосты интегралов отрезаются при |t - x| >= 40b, остаток не больше ||h~|| e^{-40}
TRUNCATION = 40.0
STEP = 1e-4
NORM_RTOL = 1e-6
NORM_ATOL = 1e-9
RESIDUAL_TOL = 1e-6
DERIVATIVE_TOL = 1e-5


@dataclass(frozen=True)
class SteinSolution:
    """Решение уравнения Стейна для Лапласа с тестовой функцией h"""

    b: float
    h: TestFunction
    mean_h: float
    sign: int

    def h_tilde(self, x):
        return np.asarray(self.h(x), dtype=float) - self.mean_h

    def _integrals(self, x: float) -> Tuple[float, float]:
        b = self.b
        span = TRUNCATION * b
        ahead = [k - x for k in self.h.kinks if 0 < k - x < span]
        behind = [x - k for k in self.h.kinks if 0 < x - k < span]
        try:
            i_plus, _ = quad_split(
                lambda u: math.exp(-u / b) * float(self.h_tilde(x + u)),
                0.0,
                span,
                ahead,
                epsabs=1e-13,
                epsrel=1e-12,
            )
            i_minus, _ = quad_split(
                lambda u: math.exp(-u / b) * float(self.h_tilde(x - u)),
                0.0,
                span,
                behind,
                epsabs=1e-13,
                epsrel=1e-12,
            )
        except QuadratureError as e:
            raise QuadratureError(f"решение уравнения Стейна для {self.h.name}", x) from e
        return i_plus, i_minus

    def evaluate(self, x) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(f, f', f'') в точках x; f'' = (f + h~)/b^2 из самого уравнения"""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        b, s = self.b, self.sign
        pairs = np.array([self._integrals(float(t)) for t in x]).reshape(-1, 2)
        i_plus, i_minus = pairs[:, 0], pairs[:, 1]
        f = s * (i_plus + i_minus) / (2 * b)
        f1 = s * (i_plus - i_minus) / (2 * b**2)
        f2 = (f + self.h_tilde(x)) / b**2
        return f, f1, f2

    def f(self, x):
        return self.evaluate(x)[0]

    def f1(self, x):
        return self.evaluate(x)[1]

    def f2(self, x):
        return self.evaluate(x)[2]

    def characterization_gap(self) -> float:
        """E[b^2 f''(Z) - f(Z) + f(0)] для Z ~ Laplace(0, b); ноль с точностью квадратуры"""
        b = self.b
        f0 = float(self.f(0.0)[0])

        def integrand(t: float) -> float:
            f, _, f2 = self.evaluate(t)
            return (b**2 * f2[0] - f[0] + f0) * math.exp(-abs(t) / b) / (2 * b)

        value, _ = quad_split(integrand, -TRUNCATION * b, TRUNCATION * b, (0.0, *self.h.kinks), epsabs=1e-10)
        return value


def laplace_expectation(h: TestFunction, b: float) -> float:
    """E h(Z), Z ~ Laplace(0, b)"""
    value, _ = quad_split(
        lambda t: float(h(t)) * math.exp(-abs(t) / b) / (2 * b),
        -math.inf,
        math.inf,
        (0.0, *h.kinks),
        epsabs=1e-13,
        epsrel=1e-12,
    )
    return value


@lru_cache(maxsize=None)
def resolve_sign() -> int:
    """
    Знак s, при котором s (I+ + I-)/(2b) решает b^2 f'' - f = h~

    Проверяется конечными разностями на h = sin, b = 1, x = 0.3.
    """
    trial = SteinSolution(b=1.0, h=sine(1.0), mean_h=0.0, sign=1)
    x0, delta = 0.3, 1e-3
    g = trial.evaluate([x0 - delta, x0, x0 + delta])[0]
    g2 = (g[0] - 2 * g[1] + g[2]) / delta**2
    h0 = float(trial.h_tilde(x0))
    plus = abs(g2 - g[1] - h0)
    minus = abs(-g2 + g[1] - h0)
    sign = 1 if plus < minus else -1
    logger.info("знак решения уравнения Стейна: %+d (невязки %.2e и %.2e)", sign, plus, minus)
    return sign


def solve_laplace_stein(h: TestFunction, b: float) -> SteinSolution:
    """Ограниченное решение b^2 f'' - f = h - E h(Z), f(0) = 0"""
    if not b > 0:
        raise DomainError(f"масштаб Лапласа должен быть положительным, получено b={b}")
    return SteinSolution(b=b, h=h, mean_h=laplace_expectation(h, b), sign=resolve_sign())


def _grid_report(name: str, observed: float, bound: float, h: TestFunction, b: float, metric: str = "norm"):
    estimate = DistanceEstimate(abs(observed), NORM_RTOL * bound + NORM_ATOL, "grid")
    return BoundReport(name=name, inputs={"h": h.name, "b": b}, bound=bound, empirical=estimate, metric=metric)


def verify_solution_bounds(
    h: TestFunction, b: float, grid: Optional[Sequence[float]] = None
) -> List[BoundReport]:
    """
    Проверяет на сетке оценки решения, применимые к классу h

    Ограниченная h: ||f|| <= ||h~||, ||f'|| <= ||h~||/b, ||f''|| <= 2||h~||/b^2.
    Липшицева h: |f(x)| <= (2b + |x|)||h'||, ||f'|| <= ||h'||, ||f''|| <= ||h'||/b,
    ||f'''|| <= 2||h'||/b^2; при известной ||h''|| ещё ||f''|| <= ||h''||, ||f'''|| <= ||h''||/b.
    Сглаженные индикаторы: ||f|| <= 1, ||f'|| <= 1/b, ||f''|| <= 2/b^2.
    Дополнительно: невязка уравнения и совпадение f' с конечными разностями.
    """
    x = np.linspace(-10 * b, 10 * b, 200) if grid is None else np.asarray(grid, dtype=float)
    if x.size == 0:
        raise DomainError("сетка пуста")
    solution = solve_laplace_stein(h, b)
    delta = STEP * b
    f, f1, f2 = solution.evaluate(x)
    f_up, f1_up, f2_up = solution.evaluate(x + delta)
    f_down, f1_down, f2_down = solution.evaluate(x - delta)
    fd_f1 = (f_up - f_down) / (2 * delta)
    fd_f2 = (f1_up - f1_down) / (2 * delta)
    f3 = (f2_up - f2_down) / (2 * delta)
    kinks = np.asarray(h.kinks, dtype=float)
    if kinks.size:
        smooth = np.min(np.abs(x[:, None] - kinks[None, :]), axis=1) > 2 * delta
    else:
        smooth = np.ones_like(x, dtype=bool)

    reports: List[BoundReport] = []
    if h.bounded:
        norm = h.tilde_norm(solution.mean_h)
        reports += [
            _grid_report("firstbounds:f", np.max(np.abs(f)), norm, h, b),
            _grid_report("firstbounds:f1", np.max(np.abs(f1)), norm / b, h, b),
            _grid_report("firstbounds:f2", np.max(np.abs(f2)), 2 * norm / b**2, h, b),
        ]
    if h.family == "smoothed_indicator":
        reports += [
            _grid_report("hae:f", np.max(np.abs(f)), 1.0, h, b),
            _grid_report("hae:f1", np.max(np.abs(f1)), 1.0 / b, h, b),
            _grid_report("hae:f2", np.max(np.abs(f2)), 2.0 / b**2, h, b),
        ]
    if h.lipschitz:
        ratio = np.max(np.abs(f) / ((2 * b + np.abs(x)) * h.lip))
        reports += [
            _grid_report("nonuniform", ratio, 1.0, h, b),
            _grid_report("lipbounds:f1", np.max(np.abs(f1)), h.lip, h, b),
            _grid_report("lipbounds:f2", np.max(np.abs(f2)), h.lip / b, h, b),
            _grid_report("lipbounds:f3", np.max(np.abs(f3[smooth])), 2 * h.lip / b**2, h, b),
        ]
    if h.d2_norm is not None:
        reports += [
            _grid_report("lipbounds:k1:f2", np.max(np.abs(f2)), h.d2_norm, h, b),
            _grid_report("lipbounds:k1:f3", np.max(np.abs(f3[smooth])), h.d2_norm / b, h, b),
        ]
    scale = np.maximum(1.0, np.abs(solution.h_tilde(x)))
    residual = np.abs(b**2 * fd_f2 - f - solution.h_tilde(x)) / scale
    reports.append(
        BoundReport(
            name="ode-residual",
            inputs={"h": h.name, "b": b},
            bound=RESIDUAL_TOL,
            empirical=DistanceEstimate(float(np.max(residual[smooth])), 0.0, "finite-difference"),
            metric="residual",
        )
    )
    reports.append(
        BoundReport(
            name="firstd",
            inputs={"h": h.name, "b": b},
            bound=DERIVATIVE_TOL,
            empirical=DistanceEstimate(float(np.max(np.abs(fd_f1 - f1)[smooth])), 0.0, "finite-difference"),
            metric="residual",
        )
    )
    failed = [r.name for r in reports if not r.satisfied]
    if failed:
        logger.warning("%s, b=%g: нарушены %s", h.name, b, ", ".join(failed))
    return reports
