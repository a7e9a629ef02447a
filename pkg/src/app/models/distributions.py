"""Каталог законов: Лаплас, нормальный, Рэлей, хи, U_n = sqrt(n B_{n-1}), геометрический"""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np
from scipy import special, stats

from ..utils.errors import DomainError
from ..utils.quadrature import quad_split
from .specfun import gamma_ratio, log_gamma

ArrayFn = Callable[[np.ndarray], np.ndarray]
Sampler = Callable[[np.random.Generator, int], np.ndarray]


def open_uniform(rng: np.random.Generator, size) -> np.ndarray:
    """Равномерные величины строго внутри (0, 1)"""
    return (rng.integers(0, 1 << 53, size=size) + 0.5) / float(1 << 53)


@dataclass(frozen=True)
class DistributionHandle:
    """Набор возможностей одномерного закона; отсутствующие поля равны None"""

    name: str
    cdf: ArrayFn
    quantile: ArrayFn
    sampler: Sampler
    support: Tuple[float, float] = (-math.inf, math.inf)
    density: Optional[ArrayFn] = None
    raw_moment: Optional[Callable[[int], float]] = None
    abs_moment: Optional[Callable[[float], float]] = None
    # E[(X - x)^+] и E[((X - x)^+)^2]
    stop_loss: Optional[ArrayFn] = None
    stop_loss2: Optional[ArrayFn] = None
    cf: Optional[Callable[[np.ndarray], np.ndarray]] = None
    atoms: Tuple[float, ...] = field(default_factory=tuple)
    # веса атомов для дискретных законов без плотности
    weights: Tuple[float, ...] = field(default_factory=tuple)

    @property
    def has_density(self) -> bool:
        return self.density is not None

    @property
    def has_moments(self) -> bool:
        return self.raw_moment is not None and self.abs_moment is not None

    @property
    def mean(self) -> float:
        if self.raw_moment is None:
            return float(self._quad(lambda x: x))
        return self.raw_moment(1)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return self.sampler(rng, size)

    def integrated_cdf(self, x):
        """G(x) = int_{-inf}^x F(t) dt = x - E X + E[(X - x)^+]"""
        if self.stop_loss is None:
            raise DomainError(f"{self.name}: нет stop-loss преобразования")
        x = np.asarray(x, dtype=float)
        return x - self.mean + self.stop_loss(x)

    def expect(self, g: Callable[[float], float]) -> float:
        """E g(X): сумма по атомам для дискретного закона, иначе квадратура"""
        if self.density is None and self.weights:
            return math.fsum(w * g(a) for a, w in zip(self.atoms, self.weights))
        return self._quad(g)

    def _quad(self, g: Callable[[float], float]) -> float:
        if self.density is None:
            raise DomainError(f"{self.name}: нет плотности для интегрирования")
        lo, hi = self.support
        value, _ = quad_split(lambda t: g(t) * float(self.density(t)), lo, hi, self.atoms)
        return value


@dataclass(frozen=True)
class LaplaceParams:
    """Параметры Laplace(a, b): сдвиг a и масштаб b > 0"""

    a: float = 0.0
    b: float = 1.0

    def __post_init__(self):
        if not self.b > 0:
            raise DomainError(f"масштаб Лапласа должен быть положительным, получено b={self.b}")

    @property
    def variance(self) -> float:
        return 2.0 * self.b**2


def laplace_handle(params: LaplaceParams) -> DistributionHandle:
    """Закон Laplace(a, b) с плотностью exp(-|x-a|/b)/(2b)"""
    a, b = params.a, params.b

    def density(x):
        return np.exp(-np.abs(np.asarray(x, dtype=float) - a) / b) / (2.0 * b)

    def cdf(x):
        z = (np.asarray(x, dtype=float) - a) / b
        return np.where(z < 0, 0.5 * np.exp(np.minimum(z, 0.0)), 1.0 - 0.5 * np.exp(-np.maximum(z, 0.0)))

    def quantile(u):
        u = np.asarray(u, dtype=float)
        lower = a + b * np.log(2.0 * np.minimum(u, 0.5))
        upper = a - b * np.log(2.0 * (1.0 - np.maximum(u, 0.5)))
        return np.where(u < 0.5, lower, upper)

    def sampler(rng, size):
        return quantile(open_uniform(rng, size))

    def raw_moment(r: int) -> float:
        # E (a + bY)^r, E Y^k = k! для чётных k
        return math.fsum(
            math.comb(r, k) * a ** (r - k) * b**k * math.factorial(k)
            for k in range(0, r + 1, 2)
        )

    def abs_moment(r: float) -> float:
        if a == 0.0:
            return b**r * math.gamma(r + 1.0)
        lo, hi = a - 60 * b, a + 60 * b
        value, _ = quad_split(lambda t: abs(t) ** r * float(density(t)), lo, hi, (0.0, a))
        return value

    def stop_loss(x):
        d = np.asarray(x, dtype=float) - a
        return np.where(
            d >= 0,
            0.5 * b * np.exp(-np.maximum(d, 0.0) / b),
            -d + 0.5 * b * np.exp(np.minimum(d, 0.0) / b),
        )

    def stop_loss2(x):
        d = np.asarray(x, dtype=float) - a
        return np.where(
            d >= 0,
            b**2 * np.exp(-np.maximum(d, 0.0) / b),
            2.0 * b**2 + d**2 - b**2 * np.exp(np.minimum(d, 0.0) / b),
        )

    def cf(t):
        t = np.asarray(t, dtype=float)
        return np.exp(1j * a * t) / (1.0 + (b * t) ** 2)

    return DistributionHandle(
        name=f"Laplace({a:g},{b:g})",
        cdf=cdf,
        quantile=quantile,
        sampler=sampler,
        density=density,
        raw_moment=raw_moment,
        abs_moment=abs_moment,
        stop_loss=stop_loss,
        stop_loss2=stop_loss2,
        cf=cf,
        atoms=(a,),
    )


def normal_handle(sigma: float) -> DistributionHandle:
    """Закон N(0, sigma^2)"""
    if not sigma > 0:
        raise DomainError(f"sigma должна быть положительной, получено {sigma}")
    law = stats.norm(scale=sigma)

    def stop_loss(x):
        z = np.asarray(x, dtype=float) / sigma
        return sigma * stats.norm.pdf(z) - sigma * z * stats.norm.sf(z)

    def stop_loss2(x):
        x = np.asarray(x, dtype=float)
        z = x / sigma
        return (sigma**2 + x**2) * stats.norm.sf(z) - x * sigma * stats.norm.pdf(z)

    def raw_moment(r: int) -> float:
        if r % 2:
            return 0.0
        return sigma**r * math.prod(range(r - 1, 0, -2))

    def abs_moment(r: float) -> float:
        return sigma**r * 2 ** (r / 2) * math.exp(log_gamma((r + 1) / 2)) / math.sqrt(math.pi)

    return DistributionHandle(
        name=f"N(0,{sigma:g}^2)",
        cdf=law.cdf,
        quantile=law.ppf,
        sampler=lambda rng, size: sigma * rng.standard_normal(size),
        density=law.pdf,
        raw_moment=raw_moment,
        abs_moment=abs_moment,
        stop_loss=stop_loss,
        stop_loss2=stop_loss2,
        cf=lambda t: np.exp(-0.5 * (sigma * np.asarray(t, dtype=float)) ** 2) + 0j,
    )


def rayleigh_handle(sigma: float) -> DistributionHandle:
    """
    Закон Rayleigh(sigma) с плотностью x/sigma^2 exp(-x^2/(2 sigma^2)), x > 0

    Смешивающая величина U представления Лапласа: rayleigh_handle(1/sqrt(2))
    с плотностью 2x exp(-x^2).
    """
    if not sigma > 0:
        raise DomainError(f"sigma должна быть положительной, получено {sigma}")
    s2 = sigma**2

    def density(x):
        x = np.asarray(x, dtype=float)
        return np.where(x > 0, x / s2 * np.exp(-(x**2) / (2 * s2)), 0.0)

    def cdf(x):
        x = np.maximum(np.asarray(x, dtype=float), 0.0)
        return -np.expm1(-(x**2) / (2 * s2))

    def quantile(u):
        return sigma * np.sqrt(-2.0 * np.log1p(-np.asarray(u, dtype=float)))

    def moment(r: float) -> float:
        return sigma**r * 2 ** (r / 2) * math.gamma(1.0 + r / 2)

    return DistributionHandle(
        name=f"Rayleigh({sigma:g})",
        cdf=cdf,
        quantile=quantile,
        sampler=lambda rng, size: quantile(open_uniform(rng, size)),
        support=(0.0, math.inf),
        density=density,
        raw_moment=moment,
        abs_moment=moment,
    )


def chi_density(x, k: float):
    """Плотность chi(k): x^{k-1} e^{-x^2/2} / (2^{k/2-1} Г(k/2)), x > 0"""
    x = np.asarray(x, dtype=float)
    safe = np.where(x > 0, x, 1.0)
    log_rho = (
        (k - 1) * np.log(safe) - safe**2 / 2 - (k / 2 - 1) * math.log(2.0) - log_gamma(k / 2)
    )
    return np.where(x > 0, np.exp(log_rho), 0.0)


def chi_handle(k: float) -> DistributionHandle:
    """Закон chi с k > 0 степенями свободы"""
    if not k > 0:
        raise DomainError(f"число степеней свободы должно быть положительным, получено {k}")

    def cdf(x):
        x = np.maximum(np.asarray(x, dtype=float), 0.0)
        return special.gammainc(k / 2, x**2 / 2)

    def quantile(u):
        return np.sqrt(2.0 * special.gammaincinv(k / 2, np.asarray(u, dtype=float)))

    def moment(r: float) -> float:
        return 2 ** (r / 2) * gamma_ratio((k + r) / 2, k / 2)

    return DistributionHandle(
        name=f"chi({k:g})",
        cdf=cdf,
        quantile=quantile,
        sampler=lambda rng, size: np.sqrt(rng.chisquare(k, size)),
        support=(0.0, math.inf),
        density=lambda x: chi_density(x, k),
        raw_moment=moment,
        abs_moment=moment,
    )


def beta_one_sampler(m: float) -> Sampler:
    """Beta(1, m) обратным преобразованием: B = 1 - (1 - U)^{1/m}"""
    if not m > 0:
        raise DomainError(f"параметр Beta(1, m) должен быть положительным, получено {m}")

    def sampler(rng, size):
        u = open_uniform(rng, size)
        return -np.expm1(np.log1p(-u) / m)

    return sampler


@dataclass(frozen=True)
class ScaledBetaRoot:
    """U_n = sqrt(n B_{n-1}), B_{n-1} ~ Beta(1, n-1); носитель (0, sqrt(n))"""

    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"U_n определена при целом n >= 2, получено n={self.n}")

    def cdf(self, u):
        n = self.n
        u = np.clip(np.asarray(u, dtype=float), 0.0, math.sqrt(n))
        return -np.expm1((n - 1) * np.log1p(-(u**2) / n))

    def density(self, u):
        n = self.n
        u = np.asarray(u, dtype=float)
        inside = (u > 0) & (u < math.sqrt(n))
        base = np.where(inside, 1.0 - u**2 / n, 1.0)
        return np.where(inside, 2.0 * u * (n - 1) / n * base ** (n - 2), 0.0)

    def quantile(self, v):
        n = self.n
        v = np.asarray(v, dtype=float)
        return np.sqrt(-n * np.expm1(np.log1p(-v) / (n - 1)))

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return np.sqrt(self.n * beta_one_sampler(self.n - 1)(rng, size))

    def moment(self, r: int) -> float:
        return scaled_beta_root_moment(self.n, r)

    def handle(self) -> DistributionHandle:
        return DistributionHandle(
            name=f"U_{self.n}",
            cdf=self.cdf,
            quantile=self.quantile,
            sampler=self.sample,
            support=(0.0, math.sqrt(self.n)),
            density=self.density,
            raw_moment=self.moment,
            abs_moment=self.moment,
        )


def scaled_beta_root_moment(n: int, r: int) -> float:
    """
    E[U_n^r] = n^{r/2} Г(r/2 + 1) Г(n) / Г(n + r/2), r = 0..4

    В частности E[U_n^2] = 1 и E[U_n^3] = 3 sqrt(pi) n^{3/2} Г(n) / (4 Г(n + 3/2)).
    """
    if int(n) != n or n < 2:
        raise DomainError(f"n должно быть целым >= 2, получено {n}")
    if int(r) != r or not 0 <= r <= 4:
        raise DomainError(f"поддерживаются порядки r = 0..4, получено r={r}")
    if r in (0, 2):
        return 1.0
    if r == 4:
        return 2.0 * n / (n + 1)
    half = r / 2
    return math.exp(half * math.log(n) + log_gamma(half + 1)) * gamma_ratio(n, n + half)


def geometric_sampler(p: float, rng: np.random.Generator, size=None):
    """N_p ~ Geo(p) на {1, 2, ...}: N = ceil(ln U / ln(1 - p))"""
    if not 0 < p < 1:
        raise DomainError(f"p должно лежать в (0, 1), получено p={p}")
    u = open_uniform(rng, size)
    draws = np.maximum(np.ceil(np.log(u) / np.log1p(-p)), 1.0).astype(np.int64)
    return int(draws) if size is None else draws


def geometric_inverse_mean(p: float) -> float:
    """E[1/N_p] = p log(1/p) / (1 - p)"""
    if not 0 < p < 1:
        raise DomainError(f"p должно лежать в (0, 1), получено p={p}")
    return p * math.log(1.0 / p) / (1.0 - p)


def compound_geometric_cf(cf: Callable[[np.ndarray], np.ndarray], p: float):
    """Характеристическая функция S_p: p phi(sqrt(p) t) / (1 - (1 - p) phi(sqrt(p) t))"""
    if not 0 < p < 1:
        raise DomainError(f"p должно лежать в (0, 1), получено p={p}")
    scale = math.sqrt(p)

    def phi(t):
        inner = cf(scale * np.asarray(t, dtype=float))
        return p * inner / (1.0 - (1.0 - p) * inner)

    return phi
