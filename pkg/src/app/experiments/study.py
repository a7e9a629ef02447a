"""
Исследования сходимости S_p и T_n к закону Лапласа

Для каждой точки сетки: выборка, эмпирические расстояния с погрешностями,
все применимые оценки и флаги satisfied; по сетке - наклоны в лог-лог масштабе.
"""

import math
from dataclasses import asdict, dataclass, field
from importlib import metadata
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import scipy

from ..bounds.evaluators import (
    conditional_mean_bound,
    coupling_bounds,
    thm1_bounds,
    thm2_bounds,
    un_bounds,
)
from ..bounds.report import BoundReport
from ..config.study_config import ExperimentConfig
from ..memory.report_table import ReportTable
from ..metrics.distances import (
    DistanceEstimate,
    cf_lower_bounds,
    kolmogorov_empirical,
    kolmogorov_exact,
    wasserstein1_cdf,
    wasserstein1_empirical,
)
from ..models.distributions import ScaledBetaRoot, rayleigh_handle
from ..models.equilibrium import quantile_coupling_sup
from ..utils.errors import DomainError
from ..utils.log import get_logger
from .coupling import coupling_statistics
from .simulation import (
    geometric_sum_cf,
    limit_law,
    MOMENT_METRIC,
    second_moment_report,
    simulate_geometric_sum,
    simulate_tn,
    tn_cf,
)

logger = get_logger(__name__)

MIN_FIT_POINTS = 4
PRE_ASYMPTOTIC = 0.5
BETA_FACTORS = (0.25, 0.5, 1.0, 2.0)


@dataclass(frozen=True)
class RateFit:
    """Прямая log y = slope log x + intercept"""

    slope: float
    intercept: float
    r_squared: float
    points: int


def fit_rate(x: Sequence[float], y: Sequence[float]) -> RateFit:
    """Наклон по методу наименьших квадратов в лог-лог масштабе (не меньше 4 точек)"""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = (x > 0) & (y > 0) & np.isfinite(y)
    x, y = x[keep], y[keep]
    if x.size < MIN_FIT_POINTS:
        raise DomainError(f"для наклона нужно не меньше {MIN_FIT_POINTS} положительных точек, есть {x.size}")
    lx, ly = np.log(x), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    residual = ly - (slope * lx + intercept)
    total = np.sum((ly - ly.mean()) ** 2)
    r_squared = 1.0 if total == 0 else float(max(0.0, 1.0 - np.sum(residual**2) / total))
    return RateFit(float(slope), float(intercept), r_squared, int(x.size))


@dataclass
class StudyResult:
    """Таблица исследования, наклоны и путь к CSV"""

    config: ExperimentConfig
    table: ReportTable
    rate_fits: Dict[str, RateFit] = field(default_factory=dict)
    path: Optional[Path] = None

    @property
    def satisfied(self) -> bool:
        return not self.table.violations()


def _versions() -> Dict[str, str]:
    try:
        app_version = metadata.version("stein-laplace")
    except metadata.PackageNotFoundError:
        app_version = "unknown"
    return {"app": app_version, "numpy": np.__version__, "scipy": scipy.__version__, "pandas": pd.__version__}


def _attach(table: ReportTable, param: float, reports: List[BoundReport], metric: str, estimate) -> None:
    matched = [r for r in reports if r.metric == metric]
    for report in matched:
        table.add_report(param, report.with_empirical(estimate))
    if not matched:
        logger.debug("%s при %s: нет применимой оценки, строка без оценки", metric, param)
        table.add(param, metric, estimate.value, estimate.error_bound, "", np.nan, None)


def _geometric_point(config: ExperimentConfig, index: int, p: float, Q: float, table: ReportTable) -> None:
    spec = config.spec
    target = limit_law(spec)
    sample = simulate_geometric_sum(spec, p, config.replications, config.seed, key=(index,), threads=config.threads)
    table.add_report(p, second_moment_report(sample, spec.sigma2))
    reports = thm1_bounds(spec, p, Q=Q, k=1)
    estimates: Dict[str, DistanceEstimate] = {}
    if "K" in config.metrics:
        estimates["K"] = kolmogorov_empirical(sample, target.cdf)
    if "W" in config.metrics:
        estimates["W"] = wasserstein1_empirical(sample, target)
    if "cf-lower" in config.metrics:
        lower, _ = cf_lower_bounds(geometric_sum_cf(spec, p), target.cf)
        estimates["d2"] = DistanceEstimate(lower, 0.0, "cf-lower")
    for metric, estimate in estimates.items():
        _attach(table, p, reports, metric, estimate)
    for report in reports:
        if report.metric not in estimates:
            table.add_report(p, report)
    if config.coupling_pairs:
        _coupling_point(config, index, p, estimates, table)


def _coupling_point(
    config: ExperimentConfig, index: int, p: float, estimates: Dict[str, DistanceEstimate], table: ReportTable
) -> None:
    spec = config.spec
    target = limit_law(spec)
    b = spec.sigma / math.sqrt(2.0)
    betas = tuple(c * math.sqrt(p) * spec.sigma for c in BETA_FACTORS)
    stats = coupling_statistics(
        spec, p, config.coupling_pairs, config.seed, beta_grid=betas, key=(index, 1), threads=config.threads
    )
    # beta с наименьшей оценкой dfgh1
    candidates = [coupling_bounds(stats.delta_stats(beta, k=1), b, beta, k=1) for beta in betas]
    reports = min(candidates, key=lambda rs: next(r.bound for r in rs if r.name == "dfgh1"))
    sum_L = {
        "K": kolmogorov_empirical(stats.sum_L, target.cdf),
        "W": wasserstein1_empirical(stats.sum_L, target),
    }
    for report in reports:
        on_equilibrium = report.note == "W^L"
        source = sum_L if on_equilibrium else estimates
        estimate = source.get(report.metric)
        table.add_report(p, report if estimate is None else report.with_empirical(estimate))
    cond = conditional_mean_bound(spec, p)
    observed = DistanceEstimate(stats.cond_mean_binned.value, 3 * stats.cond_mean_binned.se, "binned")
    table.add_report(p, cond.with_empirical(observed))


def _tn_point(config: ExperimentConfig, index: int, n: int, table: ReportTable) -> None:
    spec = config.spec
    target = limit_law(spec)
    sample = simulate_tn(spec, n, config.replications, config.seed, key=(index,), threads=config.threads)
    table.add_report(n, second_moment_report(sample, spec.sigma2))
    reports = thm2_bounds([spec], n)
    estimates: Dict[str, DistanceEstimate] = {}
    if "K" in config.metrics:
        estimates["K"] = kolmogorov_empirical(sample, target.cdf)
    if "W" in config.metrics:
        estimates["W"] = wasserstein1_empirical(sample, target)
    if "cf-lower" in config.metrics:
        _, lower = cf_lower_bounds(tn_cf(spec, n), target.cf)
        estimates["d12"] = DistanceEstimate(lower, 0.0, "cf-lower")
    for metric, estimate in estimates.items():
        _attach(table, n, reports, metric, estimate)
    for report in reports:
        if report.metric not in estimates:
            table.add_report(n, report)


def _rate_fits(table: ReportTable) -> Dict[str, RateFit]:
    """
    Наклоны эмпирических расстояний и оценок по параметру сетки

    Точки, где все оценки метрики больше 0.5, исключаются, если после этого
    остаётся не меньше четырёх точек. Контрольные строки wald не участвуют.
    """
    frame = table.to_frame()
    frame = frame[frame["metric"] != MOMENT_METRIC]
    fits: Dict[str, RateFit] = {}
    for metric, rows in frame.groupby("metric"):
        per_param = rows.groupby("param").agg(empirical=("empirical", "first"), bound=("bound", "min"))
        asymptotic = per_param[per_param["bound"] <= PRE_ASYMPTOTIC]
        used = asymptotic if len(asymptotic) >= MIN_FIT_POINTS else per_param
        if used is per_param and len(asymptotic) < len(per_param):
            logger.info("%s: меньше %d точек с оценкой <= %.1f, наклон по всей сетке", metric, MIN_FIT_POINTS, PRE_ASYMPTOTIC)
        try:
            if used["empirical"].notna().any():
                fits[str(metric)] = fit_rate(used.index, used["empirical"])
        except DomainError as e:
            logger.warning("%s: наклон не вычислен (%s)", metric, e)
        for tag, tagged in rows.groupby("bound_tag"):
            try:
                fits[f"{metric}:{tag}"] = fit_rate(tagged["param"], tagged["bound"])
            except DomainError:
                continue
    return fits


def run_convergence_study(config: ExperimentConfig, write: bool = True) -> StudyResult:
    """Прогон по сетке конфигурации; при write=True пишет CSV и JSON в output_path"""
    table = ReportTable()
    logger.info(
        "исследование %s: %s, сетка %s, %d повторений, зерно %d",
        config.kind,
        config.spec.name,
        config.grid,
        config.replications,
        config.seed,
    )
    if config.kind == "geometric":
        Q = config.quantile_gap if config.quantile_gap is not None else quantile_coupling_sup(config.spec)
        for i, p in enumerate(config.grid):
            _geometric_point(config, i, float(p), Q, table)
    else:
        for i, n in enumerate(config.grid):
            _tn_point(config, i, int(n), table)
    result = StudyResult(config=config, table=table, rate_fits=_rate_fits(table))
    if write:
        sidecar = {
            "config": config.to_json(),
            "rate_fits": {k: asdict(v) for k, v in result.rate_fits.items()},
            "versions": _versions(),
            "seed": config.seed,
        }
        result.path = table.write(config.output_path, sidecar)
    for row in table.violations():
        logger.warning("нарушена оценка %s при %s: %s", row["bound_tag"], row["param"], row)
    return result


def un_distances(n: int) -> Tuple[DistanceEstimate, DistanceEstimate]:
    """Точные d_K(U_n, U) и d_W(U_n, U) по функциям распределения, U ~ Rayleigh(1/sqrt(2))"""
    if int(n) != n or n < 2:
        raise DomainError(f"n должно быть целым >= 2, получено n={n}")
    un = ScaledBetaRoot(int(n))
    u = rayleigh_handle(1 / math.sqrt(2.0))
    hi = max(math.sqrt(n), float(u.quantile(1.0 - 1e-15))) + 1.0
    edge = (math.sqrt(n),)
    d_k = kolmogorov_exact(un.cdf, u.cdf, 0.0, hi, edge)
    d_w = wasserstein1_cdf(un.cdf, u.cdf, 0.0, hi, edge)
    return d_k, d_w


def un_bound_reports(n: int) -> List[BoundReport]:
    """Оценки для U_n с точными расстояниями в качестве эмпирической части"""
    d_k, d_w = un_distances(n)
    return [r.with_empirical(d_k if r.metric == "K" else d_w) for r in un_bounds(n)]
