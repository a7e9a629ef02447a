"""Библиотека слагаемых с нулевым средним и точными моментами"""

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from ..utils.errors import ConfigError, DomainError, MissingMomentError
from .distributions import (
    DistributionHandle,
    LaplaceParams,
    laplace_handle,
    normal_handle,
    open_uniform,
)

SumSampler = Callable[[np.random.Generator, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class SummandSpec:
    """
    Закон слагаемого X с E X = 0 и E X^2 = sigma2 > 0

    Args:
        name: имя из реестра SUMMAND_FACTORIES
        params: параметры фабрики (для JSON)
        sigma2: дисперсия
        third_moment: E X^3
        fourth_moment: E X^4
        abs_moment_fn: k -> rho_k = E|X|^k
        handle: функции распределения, квантили, сэмплер
        sum_sampler: точный сэмплер сумм n копий (если есть)
        equilibrium_fixed: закон X^L совпадает с законом X
    """

    name: str
    params: Dict[str, float]
    sigma2: float
    third_moment: Optional[float]
    fourth_moment: Optional[float]
    abs_moment_fn: Optional[Callable[[float], float]]
    handle: DistributionHandle
    sum_sampler: Optional[SumSampler] = field(default=None, compare=False)
    equilibrium_fixed: bool = False

    def __post_init__(self):
        if not self.sigma2 > 0:
            raise DomainError(f"{self.name}: дисперсия должна быть положительной")

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)

    @property
    def symmetric(self) -> bool:
        return self.third_moment is not None and abs(self.third_moment) < 1e-14

    def rho(self, k: float, bound: str = "rho") -> float:
        """rho_k = E|X|^k; rho_2 = sigma^2"""
        if k == 2:
            return self.sigma2
        if self.abs_moment_fn is None:
            raise MissingMomentError(bound, f"E|X|^{k:g}")
        return self.abs_moment_fn(k)

    def require_third(self, bound: str) -> float:
        if self.third_moment is None:
            raise MissingMomentError(bound, "E X^3")
        return self.third_moment

    def require_fourth(self, bound: str) -> float:
        if self.fourth_moment is None:
            raise MissingMomentError(bound, "E X^4")
        return self.fourth_moment

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return self.handle.sample(rng, size)

    def sample_sums(self, rng: np.random.Generator, counts: np.ndarray) -> np.ndarray:
        """Суммы counts[j] независимых копий X, counts[j] >= 1"""
        counts = np.asarray(counts, dtype=np.int64)
        if counts.size and counts.min() < 1:
            raise DomainError("число слагаемых должно быть не меньше 1")
        if self.sum_sampler is not None:
            return self.sum_sampler(rng, counts)
        draws = self.handle.sample(rng, int(counts.sum()))
        starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
        return np.add.reduceat(draws, starts)

    def to_json(self) -> Dict[str, Any]:
        return {"name": self.name, "params": dict(self.params)}

    @classmethod
    def from_json(cls, payload: Dict[str, Any]) -> "SummandSpec":
        return summand_from_json(payload)


def discrete_handle(atoms: Sequence[float], weights: Sequence[float], name: str) -> DistributionHandle:
    """Дискретный закон на конечном множестве точек"""
    atoms = np.asarray(atoms, dtype=float)
    weights = np.asarray(weights, dtype=float)
    order = np.argsort(atoms)
    atoms, weights = atoms[order], weights[order]
    cumulative = np.cumsum(weights)
    cumulative[-1] = 1.0

    def cdf(x):
        idx = np.searchsorted(atoms, np.asarray(x, dtype=float), side="right")
        return np.concatenate(([0.0], cumulative))[idx]

    def quantile(u):
        idx = np.searchsorted(cumulative, np.asarray(u, dtype=float), side="left")
        return atoms[np.minimum(idx, atoms.size - 1)]

    def _expect(g):
        return float(np.dot(weights, g(atoms)))

    def stop_loss(x):
        x = np.asarray(x, dtype=float)
        return np.tensordot(np.maximum(atoms[:, None] - x.ravel()[None, :], 0.0).T, weights, axes=1).reshape(x.shape)

    def stop_loss2(x):
        x = np.asarray(x, dtype=float)
        gap = np.maximum(atoms[:, None] - x.ravel()[None, :], 0.0) ** 2
        return np.tensordot(gap.T, weights, axes=1).reshape(x.shape)

    def cf(t):
        t = np.asarray(t, dtype=float)
        return np.tensordot(np.exp(1j * np.multiply.outer(t, atoms)), weights, axes=1)

    return DistributionHandle(
        name=name,
        cdf=cdf,
        quantile=quantile,
        sampler=lambda rng, size: quantile(open_uniform(rng, size)),
        support=(float(atoms[0]), float(atoms[-1])),
        raw_moment=lambda r: _expect(lambda a: a**r),
        abs_moment=lambda r: _expect(lambda a: np.abs(a) ** r),
        stop_loss=stop_loss,
        stop_loss2=stop_loss2,
        cf=cf,
        atoms=tuple(float(a) for a in atoms),
        weights=tuple(float(w) for w in weights),
    )


def rademacher(sigma: float = 1.0) -> SummandSpec:
    """Равновероятные значения -sigma и +sigma"""
    if not sigma > 0:
        raise DomainError(f"sigma должна быть положительной, получено {sigma}")

    def sum_sampler(rng, counts):
        return sigma * (2.0 * rng.binomial(counts, 0.5) - counts)

    return SummandSpec(
        name="rademacher",
        params={"sigma": sigma},
        sigma2=sigma**2,
        third_moment=0.0,
        fourth_moment=sigma**4,
        abs_moment_fn=lambda k: sigma**k,
        handle=discrete_handle([-sigma, sigma], [0.5, 0.5], f"Rademacher({sigma:g})"),
        sum_sampler=sum_sampler,
    )


def uniform(c: float = math.sqrt(3.0)) -> SummandSpec:
    """Uniform(-c, c), sigma^2 = c^2/3"""
    if not c > 0:
        raise DomainError(f"полуширина должна быть положительной, получено {c}")
    sigma2 = c**2 / 3.0

    def cdf(x):
        return np.clip((np.asarray(x, dtype=float) + c) / (2 * c), 0.0, 1.0)

    def quantile(u):
        return c * (2.0 * np.asarray(u, dtype=float) - 1.0)

    def density(x):
        return np.where(np.abs(np.asarray(x, dtype=float)) < c, 0.5 / c, 0.0)

    def stop_loss(x):
        x = np.asarray(x, dtype=float)
        inner = (c - np.clip(x, -c, c)) ** 2 / (4 * c)
        return np.where(x <= -c, -x, np.where(x >= c, 0.0, inner))

    def stop_loss2(x):
        x = np.asarray(x, dtype=float)
        inner = (c - np.clip(x, -c, c)) ** 3 / (6 * c)
        return np.where(x <= -c, sigma2 + x**2, np.where(x >= c, 0.0, inner))

    def raw_moment(r: int) -> float:
        return 0.0 if r % 2 else c**r / (r + 1)

    handle = DistributionHandle(
        name=f"Uniform(-{c:g},{c:g})",
        cdf=cdf,
        quantile=quantile,
        sampler=lambda rng, size: quantile(open_uniform(rng, size)),
        support=(-c, c),
        density=density,
        raw_moment=raw_moment,
        abs_moment=lambda k: c**k / (k + 1),
        stop_loss=stop_loss,
        stop_loss2=stop_loss2,
        cf=lambda t: np.sinc(c * np.asarray(t, dtype=float) / math.pi) + 0j,
        atoms=(-c, c),
    )
    return SummandSpec(
        name="uniform",
        params={"c": c},
        sigma2=sigma2,
        third_moment=0.0,
        fourth_moment=c**4 / 5.0,
        abs_moment_fn=lambda k: c**k / (k + 1),
        handle=handle,
    )


def two_point(q: float = 0.2, alpha: float = 2.0) -> SummandSpec:
    """Асимметричный закон: -alpha с вероятностью q, beta = q alpha/(1-q) с вероятностью 1-q"""
    if not 0 < q < 1 or not alpha > 0:
        raise DomainError(f"нужно 0 < q < 1 и alpha > 0, получено q={q}, alpha={alpha}")
    beta = q * alpha / (1.0 - q)

    def rho(k: float) -> float:
        return q * alpha**k + (1 - q) * beta**k

    def sum_sampler(rng, counts):
        up = rng.binomial(counts, 1.0 - q)
        return up * beta - (counts - up) * alpha

    return SummandSpec(
        name="two_point",
        params={"q": q, "alpha": alpha},
        sigma2=rho(2),
        third_moment=-q * alpha**3 + (1 - q) * beta**3,
        fourth_moment=rho(4),
        abs_moment_fn=rho,
        handle=discrete_handle([-alpha, beta], [q, 1 - q], f"TwoPoint({q:g},{alpha:g})"),
        sum_sampler=sum_sampler,
    )


def laplace_summand(b: float = 1.0 / math.sqrt(2.0)) -> SummandSpec:
    """Laplace(0, b): неподвижная точка геометрического суммирования"""
    handle = laplace_handle(LaplaceParams(0.0, b))

    def sum_sampler(rng, counts):
        return b * (rng.standard_gamma(counts) - rng.standard_gamma(counts))

    return SummandSpec(
        name="laplace",
        params={"b": b},
        sigma2=2.0 * b**2,
        third_moment=0.0,
        fourth_moment=24.0 * b**4,
        abs_moment_fn=lambda k: b**k * math.gamma(k + 1.0),
        handle=handle,
        sum_sampler=sum_sampler,
        equilibrium_fixed=True,
    )


def normal_summand(sigma: float = 1.0) -> SummandSpec:
    """N(0, sigma^2); суммы n копий точно нормальны"""
    handle = normal_handle(sigma)

    def sum_sampler(rng, counts):
        return sigma * np.sqrt(counts) * rng.standard_normal(counts.shape)

    return SummandSpec(
        name="normal",
        params={"sigma": sigma},
        sigma2=sigma**2,
        third_moment=0.0,
        fourth_moment=3.0 * sigma**4,
        abs_moment_fn=handle.abs_moment,
        handle=handle,
        sum_sampler=sum_sampler,
    )


SUMMAND_FACTORIES: Dict[str, Callable[..., SummandSpec]] = {
    "rademacher": rademacher,
    "uniform": uniform,
    "two_point": two_point,
    "laplace": laplace_summand,
    "normal": normal_summand,
}


def summand_library() -> List[SummandSpec]:
    """Каталог слагаемых по умолчанию (все с sigma^2 = 1)"""
    return [
        rademacher(1.0),
        uniform(math.sqrt(3.0)),
        two_point(0.2, 2.0),
        laplace_summand(1.0 / math.sqrt(2.0)),
        normal_summand(1.0),
    ]


def summand_from_json(payload: Dict[str, Any]) -> SummandSpec:
    """Восстанавливает SummandSpec из {name, params}"""
    if not isinstance(payload, dict) or "name" not in payload:
        raise ConfigError("summand", "ожидается объект {name, params}")
    name = payload["name"]
    factory = SUMMAND_FACTORIES.get(name)
    if factory is None:
        known = ", ".join(sorted(SUMMAND_FACTORIES))
        raise ConfigError("summand.name", f"неизвестное слагаемое '{name}' (доступны: {known})")
    params = payload.get("params") or {}
    if not isinstance(params, dict):
        raise ConfigError("summand.params", "ожидается объект")
    try:
        return factory(**params)
    except TypeError as e:
        raise ConfigError("summand.params", str(e)) from e
    except DomainError as e:
        raise ConfigError("summand.params", str(e)) from e
