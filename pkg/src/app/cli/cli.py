import json
import math
from typing import Any, Dict, List, Optional

import numpy as np
import typer
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from ..bounds.evaluators import (
    clt_bounds,
    conditional_mean_bound,
    random_sum_bounds,
    thm1_bounds,
    thm2_bounds,
    thm2_composition,
)
from ..bounds.printed_constants import (
    C_RAYLEIGH_FPRIME,
    C_SMOOTH,
    KOLMOGOROV_SMOOTH,
    KOLMOGOROV_TAIL,
    audit_constants,
)
from ..bounds.report import BoundReport
from ..config.runtime_config import get_runtime_config
from ..document_loaders.config_loader import StudyConfigLoader
from ..experiments.study import run_convergence_study, un_bound_reports
from ..memory.report_table import NpEncoder
from ..models.summands import SUMMAND_FACTORIES
from ..stein.chi import rayleigh_bound_constants, rayleigh_constants, verify_chi_bounds
from ..stein.laplace import verify_solution_bounds
from ..stein.test_functions import FAMILIES, family
from ..utils.errors import ConfigError, ConfigFileNotFound, DomainError, MissingMomentError
from ..utils.log import setup_logging

app = typer.Typer(
    help=(
        "Приближение законом Лапласа методом Стейна: константы, оценки и проверки.\n"
        "\n"
        "Примеры использования:\n"
        "  run constants\n"
        "  run study --config data/geom_rademacher.json\n"
        "  run stein-check --family lipschitz --b 0.5\n"
        "  run bounds --summand rademacher --p 0.01\n"
        "  run metrics --n-max 50\n"
        "\n"
        "Используйте --help для получения справки по каждой команде."
    ),
    no_args_is_help=True,
)
console = Console()

EXIT_VIOLATION = 1
EXIT_CONFIG = 2


@app.callback()
def configure(
    log_level: Optional[str] = typer.Option(
        None, "--log-level", help="Уровень логирования (по умолчанию STEIN_LOG_LEVEL)"
    ),
):
    """Настройка логирования перед любой командой."""
    setup_logging(log_level or get_runtime_config().log_level)


def _emit_json(payload: Any) -> None:
    typer.echo(json.dumps(payload, ensure_ascii=False, indent=2, cls=NpEncoder))


def _fmt(value: Optional[float], digits: int = 6) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "-"
    return f"{value:.{digits}g}"


def _satisfied_mark(flag: Optional[bool]) -> str:
    if flag is None:
        return "-"
    return "[green]да[/green]" if flag else "[red]нет[/red]"


def _reports_table(title: str, reports: List[BoundReport]) -> Table:
    table = Table(title=title)
    table.add_column("Оценка", style="cyan", no_wrap=True)
    table.add_column("Метрика", style="magenta")
    table.add_column("Значение", justify="right")
    table.add_column("Эмпирика", justify="right")
    table.add_column("Выполнена")
    table.add_column("Пометка", style="yellow")
    for r in reports:
        empirical = None if r.empirical is None else r.empirical.value
        table.add_row(r.name, r.metric, _fmt(r.bound), _fmt(empirical), _satisfied_mark(r.satisfied), r.note)
    return table


@app.command(help="Показать рэлеевские константы, x* и сверку напечатанных констант.")
def constants(
    as_json: bool = typer.Option(False, "--json", help="Вывод в JSON"),
):
    """Константы оценок решения уравнения Стейна и их пересчёт."""
    rc = rayleigh_constants()
    scaled = rayleigh_bound_constants(1.0)
    exact_smooth = KOLMOGOROV_SMOOTH + KOLMOGOROV_TAIL
    payload: Dict[str, Any] = {
        **rc.to_json(),
        "bound1": scaled["bound1"],
        "bound2": scaled["bound2"],
        "pl79": C_RAYLEIGH_FPRIME * 2**1.5 / 2,
        "ghjk2": {"printed": C_SMOOTH, "exact": exact_smooth},
        "audit": audit_constants(),
    }
    if as_json:
        _emit_json(payload)
        return

    console.print(
        Panel(
            f"x_star={rc.x_star:.6f}  (пересечение I_1/rho_R и I_2/rho_R)\n"
            f"c_xf={rc.c_xf:.6f}  [bound3, напечатано 2.325]\n"
            f"c_fprime={rc.c_fprime:.6f}  [bound4, напечатано 6.11]\n"
            f"c_xfpp={rc.c_xfpp:.6f}  [bound5, напечатано 11.30]\n"
            f"e/2={scaled['bound1']:.6f}  [bound1 при sigma=1]\n"
            f"pl79={payload['pl79']:.4f}  [напечатано 8.6408]\n"
            f"ghjk2: {exact_smooth:.4f} против напечатанного {C_SMOOTH}",
            title="Рэлеевские константы",
            style="green",
        )
    )
    table = Table(title="Сверка напечатанных констант")
    table.add_column("Метка", style="cyan")
    table.add_column("Напечатано", justify="right")
    table.add_column("Пересчёт", justify="right")
    table.add_column("Определение", style="magenta")
    table.add_column("OK")
    for row in payload["audit"]:
        table.add_row(
            row["tag"], _fmt(row["printed"]), _fmt(row["recomputed"]), row["definition"], _satisfied_mark(row["ok"])
        )
    console.print(table)


@app.command(help="Запустить исследование сходимости по JSON-конфигурации.")
def study(
    config: str = typer.Option(..., "--config", "-c", help="Путь к JSON-конфигурации исследования"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Переопределить зерно конфигурации"),
    out: Optional[str] = typer.Option(None, "--out", "-o", help="Переопределить путь CSV"),
    as_json: bool = typer.Option(False, "--json", help="Вывод в JSON"),
):
    """Исследование сходимости; код выхода 1 при нарушенной оценке, 2 при ошибке конфигурации."""
    try:
        experiment = StudyConfigLoader(config).load()
        if seed is not None:
            experiment = experiment.with_seed(seed)
        if out is not None:
            experiment = experiment.with_output(out)
    except (ConfigError, ConfigFileNotFound) as e:
        console.print(f"[red]Ошибка конфигурации:[/red] {e}")
        raise typer.Exit(EXIT_CONFIG)

    if not as_json:
        console.print(
            Panel(
                f"{experiment.kind}: {experiment.spec.name}, сетка {experiment.grid}, "
                f"{experiment.replications} повторений, зерно {experiment.seed}",
                title="Исследование",
                style="blue",
            )
        )
    result = run_convergence_study(experiment)
    violations = result.table.violations()

    if as_json:
        _emit_json(
            {
                "path": str(result.path),
                "rows": result.table.rows,
                "rate_fits": {k: vars(v) for k, v in result.rate_fits.items()},
                "satisfied": result.satisfied,
            }
        )
    else:
        table = Table(title="Результаты")
        for column in ("param", "metric", "empirical", "error", "bound_tag", "bound", "satisfied"):
            table.add_column(column)
        for row in result.table.rows:
            table.add_row(
                _fmt(row["param"]),
                row["metric"],
                _fmt(row["empirical"]),
                _fmt(row["error"], 3),
                row["bound_tag"],
                _fmt(row["bound"]),
                _satisfied_mark(row["satisfied"]),
            )
        console.print(table)
        for name, fit in result.rate_fits.items():
            console.print(f"наклон {name}: {fit.slope:.3f} (R^2={fit.r_squared:.3f}, точек {fit.points})")
        console.print(f"Результаты записаны в {result.path}", style="green")

    if violations:
        if not as_json:
            for row in violations:
                console.print(f"[red]Нарушение:[/red] {row}")
        raise typer.Exit(EXIT_VIOLATION)


@app.command("stein-check", help="Проверить оценки решения уравнения Стейна на семействе тестовых функций.")
def stein_check(
    family_name: str = typer.Option("indicator", "--family", "-f", help=f"Семейство: {', '.join(FAMILIES)}"),
    b: float = typer.Option(1.0, "--b", help="Масштаб закона Лапласа"),
    points: int = typer.Option(200, "--points", min=1, help="Число узлов сетки"),
    k: Optional[float] = typer.Option(None, "--k", help="Дополнительно проверить уравнение chi(k)"),
    as_json: bool = typer.Option(False, "--json", help="Вывод в JSON"),
):
    """Максимальные отношения измеренной нормы к оценке для каждой тестовой функции."""
    if family_name not in FAMILIES:
        console.print(f"[red]Неизвестное семейство:[/red] {family_name} (доступны: {', '.join(FAMILIES)})")
        raise typer.Exit(EXIT_CONFIG)
    if not b > 0:
        console.print(f"[red]Масштаб должен быть положительным:[/red] {b}")
        raise typer.Exit(EXIT_CONFIG)

    grid = np.linspace(-10 * b, 10 * b, points)
    results = []
    for h in family(family_name):
        reports = verify_solution_bounds(h, b, grid)
        if k is not None:
            chi_grid = np.linspace(0.05, 6.0, points)
            reports += verify_chi_bounds(h, k, chi_grid)
        ratio = max(r.ratio for r in reports if r.ratio is not None)
        ok = all(r.satisfied is not False for r in reports)
        results.append({"h": h.name, "max_ratio": ratio, "passed": ok, "reports": reports})
    passed = all(item["passed"] for item in results)

    if as_json:
        _emit_json({"family": family_name, "b": b, "k": k, "passed": passed, "results": results})
    else:
        table = Table(title=f"Семейство {family_name}, b={b:g}")
        table.add_column("h", style="cyan")
        table.add_column("max отношение", justify="right")
        table.add_column("Худшая оценка", style="magenta")
        table.add_column("OK")
        for item in results:
            worst = max(item["reports"], key=lambda r: r.ratio or 0.0)
            table.add_row(item["h"], _fmt(item["max_ratio"]), worst.name, _satisfied_mark(item["passed"]))
        console.print(table)
        console.print("Все оценки выполнены" if passed else "Есть нарушения", style="green" if passed else "red")
    if not passed:
        raise typer.Exit(EXIT_VIOLATION)


@app.command(help="Показать все оценки в замкнутом виде для слагаемого и p (или n).")
def bounds(
    summand: str = typer.Option("rademacher", "--summand", "-s", help="Слагаемое из каталога"),
    p: Optional[float] = typer.Option(None, "--p", help="Параметр геометрической суммы"),
    n: Optional[int] = typer.Option(None, "--n", help="Число слагаемых T_n"),
    quantile_gap: Optional[float] = typer.Option(None, "--Q", help="Разрыв квантилей для wedfg"),
    k: int = typer.Option(1, "--k", min=1, help="Порядок моментов для taubound"),
    as_json: bool = typer.Option(False, "--json", help="Вывод в JSON"),
):
    """Оценки теорем для геометрических сумм (--p) или для T_n (--n)."""
    factory = SUMMAND_FACTORIES.get(summand)
    if factory is None:
        console.print(f"[red]Неизвестное слагаемое:[/red] {summand} (доступны: {', '.join(sorted(SUMMAND_FACTORIES))})")
        raise typer.Exit(EXIT_CONFIG)
    if (p is None) == (n is None):
        console.print("[red]Укажите ровно один из параметров --p или --n[/red]")
        raise typer.Exit(EXIT_CONFIG)
    spec = factory()
    try:
        if p is not None:
            reports = thm1_bounds(spec, p, Q=quantile_gap, k=k)
            reports += random_sum_bounds(spec, p, Q=quantile_gap)
            reports.append(conditional_mean_bound(spec, p))
            title = f"{spec.name}, p={p:g}"
        else:
            reports = thm2_bounds([spec], n) + thm2_composition([spec], n) + clt_bounds([spec], n)
            title = f"{spec.name}, n={n}"
    except (DomainError, MissingMomentError) as e:
        console.print(f"[red]Ошибка параметров:[/red] {e}")
        raise typer.Exit(EXIT_CONFIG)

    if as_json:
        _emit_json({"summand": spec.to_json(), "p": p, "n": n, "bounds": [r.to_json() for r in reports]})
    else:
        console.print(_reports_table(title, reports))


@app.command(help="Точные расстояния от U_n до U в сравнении с оценками.")
def metrics(
    n_min: int = typer.Option(2, "--n-min", min=2, help="Наименьшее n"),
    n_max: int = typer.Option(50, "--n-max", min=2, help="Наибольшее n"),
    as_json: bool = typer.Option(False, "--json", help="Вывод в JSON"),
):
    """d_K(U_n, U) и d_W(U_n, U) против pl12, eskol, pl14, esw."""
    if n_max < n_min:
        console.print("[red]Нужно n-min <= n-max[/red]")
        raise typer.Exit(EXIT_CONFIG)
    rows = []
    for n in range(n_min, n_max + 1):
        reports = un_bound_reports(n)
        by_name = {r.name: r for r in reports}
        rows.append(
            {
                "n": n,
                "d_K": by_name["pl12"].empirical.value,
                "d_W": by_name["pl14"].empirical.value,
                **{name: r.bound for name, r in by_name.items()},
                "satisfied": all(r.satisfied is not False for r in reports),
            }
        )
    passed = all(row["satisfied"] for row in rows)

    if as_json:
        _emit_json({"rows": rows, "passed": passed})
    else:
        table = Table(title="U_n против U")
        for column in ("n", "d_K", "pl12", "eskol", "d_W", "pl14", "esw", "OK"):
            table.add_column(column, justify="right")
        for row in rows:
            table.add_row(
                str(row["n"]),
                _fmt(row["d_K"], 5),
                _fmt(row["pl12"], 5),
                _fmt(row["eskol"], 5),
                _fmt(row["d_W"], 5),
                _fmt(row["pl14"], 5),
                _fmt(row.get("esw"), 5),
                _satisfied_mark(row["satisfied"]),
            )
        console.print(table)
    if not passed:
        raise typer.Exit(EXIT_VIOLATION)


if __name__ == "__main__":
    app()
