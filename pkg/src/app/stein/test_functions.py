"""Тестовые функции h для уравнений Стейна и семейства для проверок"""

import math
from dataclasses import dataclass, field
from typing import Callable, List, Literal, Optional, Tuple

import numpy as np

from ..utils.errors import DomainError

ArrayFn = Callable[[np.ndarray], np.ndarray]
FunctionClass = Literal["K", "W", "BW", "H2", "H12"]
FAMILIES = ("indicator", "lipschitz", "smooth")


@dataclass(frozen=True)
class TestFunction:
    """
    Тестовая функция h с производными и известными нормами

    Args:
        name: подпись для отчётов
        value: x -> h(x)
        d1, d2: производные, если существуют
        kind: класс K, W, BW, H2 или H12
        lower, upper: inf h и sup h (None для неограниченных h)
        lip: ||h'||
        d2_norm: ||h''||
        kinks: точки излома или разрыва
        family: имя фабрики (indicator, smoothed_indicator, ...)
    """

    __test__ = False

    name: str
    value: ArrayFn
    kind: FunctionClass
    d1: Optional[ArrayFn] = None
    d2: Optional[ArrayFn] = None
    lower: Optional[float] = None
    upper: Optional[float] = None
    lip: Optional[float] = None
    d2_norm: Optional[float] = None
    kinks: Tuple[float, ...] = field(default_factory=tuple)
    family: str = ""

    @property
    def bounded(self) -> bool:
        return self.lower is not None and self.upper is not None

    @property
    def lipschitz(self) -> bool:
        return self.lip is not None

    def __call__(self, x):
        return self.value(x)

    def tilde_norm(self, mean: float) -> float:
        """||h - E h|| для ограниченной h"""
        if not self.bounded:
            return math.inf
        return max(self.upper - mean, mean - self.lower)

    def check_norms(self, grid: np.ndarray, rtol: float = 1e-9) -> bool:
        """Объявленные нормы не меньше супремумов на сетке"""
        grid = np.asarray(grid, dtype=float)
        values = np.asarray(self.value(grid), dtype=float)
        ok = True
        if self.bounded:
            ok &= bool(values.min() >= self.lower - rtol and values.max() <= self.upper + rtol)
        if self.lip is not None and self.d1 is not None:
            ok &= bool(np.abs(self.d1(grid)).max() <= self.lip * (1 + rtol))
        if self.d2_norm is not None and self.d2 is not None:
            ok &= bool(np.abs(self.d2(grid)).max() <= self.d2_norm * (1 + rtol))
        return ok


def indicator(a: float) -> TestFunction:
    """h(x) = 1(x <= a)"""
    return TestFunction(
        name=f"1(x<={a:g})",
        value=lambda x: (np.asarray(x, dtype=float) <= a).astype(float),
        kind="K",
        lower=0.0,
        upper=1.0,
        kinks=(a,),
        family="indicator",
    )


def smoothed_indicator(a: float, eps: float) -> TestFunction:
    """h_{a,eps}(x) = clamp((a - x)/eps, 0, 1): 1 при x <= a - eps, 0 при x >= a"""
    if not eps > 0:
        raise DomainError(f"eps должно быть положительным, получено {eps}")

    def value(x):
        return np.clip((a - np.asarray(x, dtype=float)) / eps, 0.0, 1.0)

    def d1(x):
        x = np.asarray(x, dtype=float)
        return np.where((x > a - eps) & (x < a), -1.0 / eps, 0.0)

    return TestFunction(
        name=f"h({a:g},{eps:g})",
        value=value,
        kind="W",
        d1=d1,
        lower=0.0,
        upper=1.0,
        lip=1.0 / eps,
        kinks=(a - eps, a),
        family="smoothed_indicator",
    )


def identity() -> TestFunction:
    """h(x) = x"""
    return TestFunction(
        name="x",
        value=lambda x: np.asarray(x, dtype=float),
        kind="W",
        d1=lambda x: np.ones_like(np.asarray(x, dtype=float)),
        d2=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        lip=1.0,
        d2_norm=0.0,
    )


def sine(omega: float = 1.0) -> TestFunction:
    """h(x) = sin(omega x)"""
    if omega == 0:
        raise DomainError("omega не может быть нулём")
    w = abs(omega)
    return TestFunction(
        name=f"sin({omega:g}x)",
        value=lambda x: np.sin(omega * np.asarray(x, dtype=float)),
        kind="BW",
        d1=lambda x: omega * np.cos(omega * np.asarray(x, dtype=float)),
        d2=lambda x: -(omega**2) * np.sin(omega * np.asarray(x, dtype=float)),
        lower=-1.0,
        upper=1.0,
        lip=w,
        d2_norm=w**2,
    )


def cosine(omega: float = 1.0) -> TestFunction:
    """h(x) = cos(omega x)"""
    if omega == 0:
        raise DomainError("omega не может быть нулём")
    w = abs(omega)
    return TestFunction(
        name=f"cos({omega:g}x)",
        value=lambda x: np.cos(omega * np.asarray(x, dtype=float)),
        kind="H12" if w <= 1 else "H2",
        d1=lambda x: -omega * np.sin(omega * np.asarray(x, dtype=float)),
        d2=lambda x: -(omega**2) * np.cos(omega * np.asarray(x, dtype=float)),
        lower=-1.0,
        upper=1.0,
        lip=w,
        d2_norm=w**2,
    )


def gaussian_bump() -> TestFunction:
    """h(x) = exp(-x^2/2); ||h'|| = e^{-1/2}, ||h''|| = 1"""
    return TestFunction(
        name="exp(-x^2/2)",
        value=lambda x: np.exp(-np.asarray(x, dtype=float) ** 2 / 2),
        kind="H12",
        d1=lambda x: -np.asarray(x, dtype=float) * np.exp(-np.asarray(x, dtype=float) ** 2 / 2),
        d2=lambda x: (np.asarray(x, dtype=float) ** 2 - 1) * np.exp(-np.asarray(x, dtype=float) ** 2 / 2),
        lower=0.0,
        upper=1.0,
        lip=math.exp(-0.5),
        d2_norm=1.0,
    )


def family(name: str) -> List[TestFunction]:
    """Семейство тестовых функций для команды stein-check"""
    if name == "indicator":
        return [indicator(a) for a in np.linspace(-3.0, 3.0, 7)]
    if name == "lipschitz":
        smoothed = [smoothed_indicator(a, eps) for a in (-1.0, 0.0, 1.0) for eps in (0.5, 1.0)]
        return [sine(1.0), identity(), *smoothed]
    if name == "smooth":
        return [sine(1.0), cosine(1.0), cosine(0.5), gaussian_bump()]
    raise DomainError(f"неизвестное семейство '{name}' (доступны: {', '.join(FAMILIES)})")
