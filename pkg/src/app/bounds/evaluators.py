"""
Оценки расстояний до закона Лапласа в замкнутом виде

Каждая функция возвращает список BoundReport; имя отчёта совпадает с меткой
неравенства. Недостающий момент слагаемого - MissingMomentError с меткой.
"""

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np

from ..models.distributions import ScaledBetaRoot, geometric_inverse_mean
from ..models.equilibrium import mean_abs_gap, quantile_coupling_sup
from ..models.specfun import gamma_ratio, hyp2f1_terminating
from ..models.summands import SummandSpec
from ..utils.errors import DomainError
from ..utils.log import get_logger
from .printed_constants import (
    C_BERRY_ESSEEN,
    C_BERRY_ESSEEN_IID,
    C_PRODUCT_WASSERSTEIN,
    C_SMOOTH,
    C_UN_WASSERSTEIN,
    KOLMOGOROV_SMOOTH,
    KOLMOGOROV_TAIL,
)
from .report import BoundReport

logger = get_logger(__name__)

SQRT2_SMOOTH = math.sqrt(2.0) * KOLMOGOROV_SMOOTH
INVERSE_SERIES_TAIL = 1e-17


def _check_p(p: float) -> None:
    if not 0 < p < 1:
        raise DomainError(f"p должно лежать в (0, 1), получено p={p}")


def _check_n(n: int) -> None:
    if int(n) != n or n < 2:
        raise DomainError(f"n должно быть целым >= 2, получено n={n}")


def _expand(specs: Sequence[SummandSpec], n: int) -> List[SummandSpec]:
    """Один закон - n одинаковых слагаемых; иначе ровно n законов с общей дисперсией"""
    specs = list(specs)
    if len(specs) == 1:
        return specs * n
    if len(specs) != n:
        raise DomainError(f"нужно 1 или {n} слагаемых, передано {len(specs)}")
    sigma2 = specs[0].sigma2
    if any(abs(s.sigma2 - sigma2) > 1e-12 * sigma2 for s in specs):
        raise DomainError("все слагаемые должны иметь одинаковую дисперсию")
    return specs


def zero_pow_zero(base: float, exponent: float) -> float:
    """base^exponent с соглашением 0^0 = 1"""
    if base == 0 and exponent == 0:
        return 1.0
    return base**exponent


# -- теорема для геометрических сумм -------------------------------------------------


def wedfg_bound(spec: SummandSpec, p: float, Q: float) -> float:
    """d_K(S_p, Z) <= sqrt(2)(7/2 + sqrt(10)) sqrt(p) Q / sigma"""
    return SQRT2_SMOOTH * math.sqrt(p) * Q / spec.sigma


def rwrwa_bound(spec: SummandSpec, p: float) -> float:
    """d_W(S_p, Z) <= 2 sigma sqrt(p) (1 + rho_3/(3 sigma^3))"""
    rho3 = spec.rho(3, bound="rwrwa")
    return 2 * spec.sigma * math.sqrt(p) * (1 + rho3 / (3 * spec.sigma**3))


def taubound(spec: SummandSpec, p: float, k: int) -> float:
    """d_K(S_p, Z) через моменты rho_k и rho_{k+2}"""
    if int(k) != k or k < 1:
        raise DomainError(f"k должно быть натуральным, получено k={k}")
    s = spec.sigma
    rho_k = spec.rho(k, bound="taubound")
    rho_k2 = spec.rho(k + 2, bound="taubound")
    inner = rho_k / s**k + 2 * rho_k2 / ((k + 1) * (k + 2) * s ** (k + 2))
    return C_SMOOTH * 2 ** ((k - 1) / (k + 1)) * (2 * p) ** (k / (2 * (k + 1))) * inner ** (1 / (k + 1))


def on11_bound(spec: SummandSpec, p: float) -> float:
    """d_2(S_p, Z) для слагаемых с E X^3 = 0 и E X^4 < inf"""
    s2 = spec.sigma2
    fourth = spec.require_fourth("on11")
    rho3 = spec.rho(3, bound="on11")
    tail = math.sqrt(p) * math.log(1 / p) / (math.sqrt(2.0) * (1 - p))
    return s2 * p * ((2 - p) / (1 - p) + fourth / (6 * s2**2) + tail * (2 + rho3 / spec.sigma**3))


def pike_ren_bw_bound(spec: SummandSpec, p: float) -> BoundReport:
    """Оценка d_BW из работы о вариационно-гамма приближении, только для сравнения"""
    _check_p(p)
    s = spec.sigma
    rho3 = spec.rho(3, bound="pike-ren")
    value = s * math.sqrt(p) * (1 + 2 * math.sqrt(2.0) / s) * (1 + rho3 / (3 * s**3))
    return BoundReport("pike-ren", {"summand": spec.name, "p": p}, value, metric="BW", note="comparison")


def thm1_bounds(
    spec: SummandSpec, p: float, Q: Optional[float] = None, k: Optional[int] = None
) -> List[BoundReport]:
    """
    Оценки расстояний от S_p до Laplace(0, sigma/sqrt(2))

    Args:
        spec: слагаемое
        p: параметр геометрического числа слагаемых
        Q: sup |F_X^{-1} - F_{X^L}^{-1}|; если не задан, считается численно
        k: порядок моментов для taubound (без него taubound не выводится)
    """
    _check_p(p)
    inputs = {"summand": spec.name, "p": p}
    if Q is None:
        Q = quantile_coupling_sup(spec)
    reports = []
    if math.isfinite(Q):
        reports.append(BoundReport("wedfg", {**inputs, "Q": Q}, wedfg_bound(spec, p, Q), metric="K"))
    else:
        logger.warning("%s: разрыв квантилей неограничен, wedfg не выводится", spec.name)
    reports.append(BoundReport("rwrwa", inputs, rwrwa_bound(spec, p), metric="W"))
    if k is not None:
        reports.append(BoundReport("taubound", {**inputs, "k": k}, taubound(spec, p, k), metric="K"))
    if abs(spec.require_third("on11")) < 1e-14:
        reports.append(BoundReport("on11", inputs, on11_bound(spec, p), metric="d2"))
    else:
        logger.info("%s: E X^3 != 0, on11 неприменима", spec.name)
    reports.append(pike_ren_bw_bound(spec, p))
    return reports


# -- теорема для T_n -----------------------------------------------------------------


def eskol_bound(n: int) -> float:
    """d_K(U_n, U) <= (1/n)(1 + 2(1 - 2/n)^{n-2})"""
    _check_n(n)
    return (1 + 2 * zero_pow_zero(1 - 2 / n, n - 2)) / n


def esw_bound(n: int) -> float:
    """
    d_W(U_n, U) через обрывающуюся 2F1(-1/2, 3 - n; 1/2; 2/n), n >= 3

    (1 - 2/n)^n считается как exp(n log1p(-2/n)).
    """
    _check_n(n)
    if n < 3:
        raise DomainError("оценка esw определена при n >= 3")
    first = -math.sqrt(math.pi) * gamma_ratio(n, n + 0.5) / (4 * math.sqrt(n))
    decay = math.exp(n * math.log1p(-2 / n))
    hyp = hyp2f1_terminating(-0.5, 3 - n, 0.5, 2 / n)
    numerator = decay * n * (40 + 11 * (n - 4) * n) + (n - 2) ** 3 * hyp
    denominator = (n - 2) ** 2 * (2 * n - 5) * (2 * n - 3) * (2 * n - 1)
    return first + 2 * math.sqrt(2.0) * (n - 1) * numerator / denominator


def un_bounds(n: int) -> List[BoundReport]:
    """Оценки d_K(U_n, U) и d_W(U_n, U)"""
    _check_n(n)
    inputs = {"n": n}
    reports = [
        BoundReport("pl12", inputs, 2 / n, metric="K"),
        BoundReport("pl14", inputs, C_UN_WASSERSTEIN / n, metric="W"),
        BoundReport("eskol", inputs, eskol_bound(n), metric="K"),
    ]
    if n >= 3:
        reports.append(BoundReport("esw", inputs, esw_bound(n), metric="W"))
    return reports


def berry_esseen_bound(specs: Sequence[SummandSpec], n: int, constant: float = C_BERRY_ESSEEN) -> float:
    s = specs[0].sigma
    total = math.fsum(x.rho(3, bound="berry-esseen") for x in specs)
    return constant * total / (s**3 * n**1.5)


def reinert_bound(specs: Sequence[SummandSpec], n: int) -> float:
    s = specs[0].sigma
    total = math.fsum(2 + x.rho(3, bound="reinert") / s**3 for x in specs)
    return s * total / n**1.5


def gaunt_bound(specs: Sequence[SummandSpec], n: int) -> float:
    s2 = specs[0].sigma2
    for x in specs:
        if not x.symmetric and x.require_third("gaunt") != 0:
            raise DomainError(f"{x.name}: оценка d_2 требует E X^3 = 0")
    total = math.fsum(1 + x.require_fourth("gaunt") / (3 * s2**2) for x in specs)
    return s2 * total / n**2


def clt_bounds(specs: Sequence[SummandSpec], n: int) -> List[BoundReport]:
    """Нормальное приближение V_n = n^{-1/2} sum X_i: Берри-Эссеен, d_W и d_2"""
    _check_n(n)
    specs = _expand(specs, n)
    inputs = {"summand": specs[0].name, "n": n}
    reports = [
        BoundReport("berry-esseen", inputs, berry_esseen_bound(specs, n), metric="K"),
        BoundReport(
            "berry-esseen-iid",
            inputs,
            berry_esseen_bound(specs, n, C_BERRY_ESSEEN_IID),
            metric="K",
            note="iid_only",
        ),
        BoundReport("minrev", inputs, reinert_bound(specs, n), metric="W"),
    ]
    if all(x.fourth_moment is not None and x.symmetric for x in specs):
        reports.append(BoundReport("thmap2d", inputs, gaunt_bound(specs, n), metric="d2"))
    return reports


def thm2_bounds(specs: Sequence[SummandSpec], n: int) -> List[BoundReport]:
    """Оценки расстояний от T_n до Laplace(0, sigma/sqrt(2))"""
    _check_n(n)
    specs = _expand(specs, n)
    s = specs[0].sigma
    inputs = {"summand": specs[0].name, "n": n}
    d_k = berry_esseen_bound(specs, n) + eskol_bound(n)
    d_w = 2 * math.sqrt(2.0) / 3 * reinert_bound(specs, n) + C_PRODUCT_WASSERSTEIN * s / n
    reports = [
        BoundReport("thm2-K", inputs, d_k, metric="K"),
        BoundReport("thm2-W", inputs, d_w, metric="W"),
    ]
    if all(x.fourth_moment is not None and x.symmetric for x in specs):
        d12 = gaunt_bound(specs, n) + C_PRODUCT_WASSERSTEIN * s / n
        reports.append(BoundReport("thm2-d12", inputs, d12, metric="d12"))
    return reports


def thm2_composition(specs: Sequence[SummandSpec], n: int) -> List[BoundReport]:
    """
    Правые части разложений d(U_n V_n, U V) через множители

    d_K <= d_K(U_n, U) + d_K(V_n, V),
    d_W <= E|V| d_W(U_n, U) + E[U_n] d_W(V_n, V),
    d_12 <= E|V| d_W(U_n, U) + E[U_n^2] d_2(V_n, V),
    с лучшими из доступных оценок множителей и точными E|V| = sigma sqrt(2/pi), E[U_n].
    Каждое значение не больше соответствующей оценки теоремы (поле theorem).
    """
    _check_n(n)
    specs = _expand(specs, n)
    s = specs[0].sigma
    theorem = {r.name: r.bound for r in thm2_bounds(specs, n)}
    un_w = C_UN_WASSERSTEIN / n if n < 3 else min(C_UN_WASSERSTEIN / n, esw_bound(n))
    abs_v = s * math.sqrt(2 / math.pi)
    mean_un = ScaledBetaRoot(n).moment(1)
    inputs = {"summand": specs[0].name, "n": n}
    composed = {
        "thm2-K": min(2 / n, eskol_bound(n)) + berry_esseen_bound(specs, n),
        "thm2-W": abs_v * un_w + mean_un * reinert_bound(specs, n),
    }
    if "thm2-d12" in theorem:
        composed["thm2-d12"] = abs_v * un_w + ScaledBetaRoot(n).moment(2) * gaunt_bound(specs, n)
    metrics = {"thm2-K": "K", "thm2-W": "W", "thm2-d12": "d12"}
    return [
        BoundReport(
            f"{tag}-composed",
            inputs,
            value,
            metric=metrics[tag],
            extras={"theorem": theorem[tag], "within_theorem": value <= theorem[tag] * (1 + 1e-12)},
        )
        for tag, value in composed.items()
    ]


# -- общие оценки через пару (W, W^L) ------------------------------------------------


@dataclass(frozen=True)
class DeltaStats:
    """
    Статистики Delta = W - W^L

    Args:
        abs_mean: E|Delta|
        sq_mean: E[Delta^2]
        tail: P(|Delta| > beta) при том beta, что передаётся в coupling_bounds
        cond_mean: E|E[Delta | W]|
        abs_moment_k: E|Delta|^k для ghjk2
    """

    abs_mean: Optional[float] = None
    sq_mean: Optional[float] = None
    tail: Optional[float] = None
    cond_mean: Optional[float] = None
    abs_moment_k: Optional[float] = None


def coupling_bounds(stats: DeltaStats, b: float, beta: float, k: Optional[int] = None) -> List[BoundReport]:
    """Оценки d_K, d_W, d_2 для W и W^L по статистикам пары; выводятся те, для которых есть данные"""
    if not beta > 0:
        raise DomainError(f"beta должно быть положительным, получено {beta}")
    if not b > 0:
        raise DomainError(f"масштаб Лапласа должен быть положительным, получено b={b}")
    inputs = {"b": b, "beta": beta}
    reports = []
    if stats.tail is not None:
        reports += [
            BoundReport("dfgh1", inputs, KOLMOGOROV_SMOOTH * beta / b + KOLMOGOROV_TAIL * stats.tail, metric="K"),
            BoundReport("dk76", inputs, beta / b + 2 * stats.tail, metric="K", note="W^L"),
        ]
    if stats.abs_mean is not None:
        reports += [
            BoundReport("zezozr", inputs, 2 * stats.abs_mean, metric="W"),
            BoundReport("zezozr1", inputs, stats.abs_mean, metric="W", note="W^L"),
            BoundReport("zezozr2", inputs, stats.abs_mean / b, metric="K", note="W^L"),
        ]
    if stats.cond_mean is not None and stats.sq_mean is not None:
        reports.append(BoundReport("ordern", inputs, b * stats.cond_mean + stats.sq_mean, metric="d2"))
    if k is not None:
        moment = stats.abs_mean if k == 1 and stats.abs_moment_k is None else stats.abs_moment_k
        if moment is not None:
            value = C_SMOOTH * (moment / b**k) ** (1 / (k + 1))
            reports.append(BoundReport("ghjk2", {**inputs, "k": k}, value, metric="K"))
    return reports


def random_sum_bounds(
    spec: SummandSpec,
    p: float,
    Q: Optional[float] = None,
    C: Optional[float] = None,
    K: float = 0.0,
    gap_mean: Optional[float] = None,
    count_gap: float = 0.0,
) -> List[BoundReport]:
    """
    Оценки для случайной суммы W_mu с mu = 1/p

    Args:
        Q: разрыв квантилей X и X^L (по умолчанию считается)
        C: граница носителя |X| <= C
        K: граница |N - M|; для геометрического N можно взять M = N и K = 0
        gap_mean: E|X_M - X_M^L| (по умолчанию E|X - X^L| квадратурой)
        count_gap: E|N - M|^{1/2}
    """
    _check_p(p)
    if K < 0:
        raise DomainError(f"K не может быть отрицательным, получено {K}")
    if K > 0 and (C is None or not math.isfinite(C)):
        raise DomainError("при K > 0 оценка wdv требует ограниченных слагаемых (задайте C)")
    mu = 1 / p
    if gap_mean is None:
        gap_mean = mean_abs_gap(spec)
    if Q is None:
        Q = quantile_coupling_sup(spec)
    inputs = {"summand": spec.name, "p": p, "K": K}
    reports = [
        BoundReport(
            "wedf",
            {**inputs, "gap_mean": gap_mean},
            2 / math.sqrt(mu) * (gap_mean + spec.sigma * count_gap),
            metric="W",
        )
    ]
    if math.isfinite(Q):
        shift = (C or 0.0) * K
        value = SQRT2_SMOOTH * (Q + shift) / (spec.sigma * math.sqrt(mu))
        reports.append(BoundReport("wdv", {**inputs, "Q": Q}, value, metric="K"))
    return reports


# -- условное среднее Delta для геометрической суммы ---------------------------------


def inverse_moments_geometric(p: float) -> Dict[str, float]:
    """
    E[1/N], E[N^{-1/2}] для N ~ Geo(p) и оценка E[N^{-1/2}] < sqrt(pi p)/(1 - p)

    E[N^{-1/2}] суммируется рядом до хвоста (1 - p)^n < 1e-17.
    """
    _check_p(p)
    terms = int(math.ceil(math.log(INVERSE_SERIES_TAIL) / math.log1p(-p))) + 1
    n = np.arange(1, terms + 1, dtype=float)
    log_weights = math.log(p) + (n - 1) * math.log1p(-p)
    inv_sqrt = math.fsum(np.exp(log_weights - 0.5 * np.log(n)))
    return {
        "inv_mean": geometric_inverse_mean(p),
        "inv_sqrt_mean": inv_sqrt,
        "inv_sqrt_bound": math.sqrt(math.pi * p) / (1 - p),
    }


def conditional_mean_bound(spec: SummandSpec, p: float) -> BoundReport:
    """
    Оценка E|E[S - S^L | S]| для геометрической суммы

    bound = sqrt(2) sigma p/(1 - p) + sigma p^{3/2} log(1/p)(2 + rho_3/sigma^3)/(1 - p);
    в extras - промежуточная оценка с точными E[N^{-1/2}] и E[1/N].
    """
    _check_p(p)
    s = spec.sigma
    moment = 2 + spec.rho(3, bound="bvc5") / s**3
    value = math.sqrt(2.0) * s * p / (1 - p) + s * p**1.5 * math.log(1 / p) * moment / (1 - p)
    inv = inverse_moments_geometric(p)
    n12b = math.sqrt(2 * p / math.pi) * s * inv["inv_sqrt_mean"] + math.sqrt(p) * s * moment * inv["inv_mean"]
    return BoundReport(
        "bvc5",
        {"summand": spec.name, "p": p},
        value,
        metric="cond-mean",
        extras={"n12b": n12b, **inv},
    )
