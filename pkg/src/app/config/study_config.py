from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

from ..models.summands import SummandSpec, summand_from_json
from ..utils.errors import ConfigError
from .runtime_config import get_runtime_config

StudyKind = Literal["geometric", "tn"]
METRICS = ("K", "W", "cf-lower")
MIN_REPLICATIONS = 10_000


def _default_output(output_dir: str, kind: str, summand: Any) -> str:
    name = summand.get("name", "summand") if isinstance(summand, dict) else "summand"
    return str(Path(output_dir) / f"{kind}_{name}.csv")


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Конфигурация исследования сходимости

    Args:
        kind: geometric (сетка p) или tn (сетка n)
        seed: главное зерно (по умолчанию STEIN_SEED)
        replications: число повторений в точке сетки (по умолчанию STEIN_REPLICATIONS)
        summand: {name, params} слагаемого
        grid: значения p или n
        metrics: подмножество {K, W, cf-lower}
        output_path: путь CSV, JSON пишется рядом (по умолчанию STEIN_OUTPUT_DIR/<kind>_<summand>.csv)
        threads: размер пула (по умолчанию STEIN_THREADS)
        quantile_gap: Q для wedfg; считается, если не задан
        coupling_pairs: число пар (S, S^L) для оценок через Delta, 0 - не считать
    """

    kind: StudyKind
    seed: int
    replications: int
    summand: Dict[str, Any]
    grid: List[float]
    metrics: List[str]
    output_path: str
    threads: Optional[int] = None
    quantile_gap: Optional[float] = None
    coupling_pairs: int = 0
    spec: SummandSpec = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "spec", summand_from_json(self.summand))

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> "ExperimentConfig":
        """Проверяет поля и строит конфигурацию; ошибка называет поле"""
        if not isinstance(payload, dict):
            raise ConfigError("config", "ожидается JSON-объект")
        for name in ("kind", "summand", "grid"):
            if name not in payload:
                raise ConfigError(name, "обязательное поле отсутствует")
        known = {f for f in cls.__dataclass_fields__ if f != "spec"}
        unknown = sorted(set(payload) - known)
        if unknown:
            raise ConfigError(unknown[0], "неизвестное поле")

        kind = payload["kind"]
        if kind not in ("geometric", "tn"):
            raise ConfigError("kind", f"ожидается geometric или tn, получено {kind!r}")
        defaults = get_runtime_config()
        seed = payload.get("seed", defaults.seed)
        if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2**64:
            raise ConfigError("seed", "ожидается 64-битное неотрицательное целое")
        replications = payload.get("replications", defaults.replications)
        if not isinstance(replications, int) or replications < MIN_REPLICATIONS:
            raise ConfigError("replications", f"нужно целое >= {MIN_REPLICATIONS}")

        grid = payload["grid"]
        if not isinstance(grid, list) or not grid:
            raise ConfigError("grid", "ожидается непустой список")
        for value in grid:
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ConfigError("grid", f"нечисловое значение {value!r}")
            if kind == "geometric" and not 0 < value < 1:
                raise ConfigError("grid", f"p должно лежать в (0, 1), получено {value}")
            if kind == "tn" and (int(value) != value or value < 2):
                raise ConfigError("grid", f"n должно быть целым >= 2, получено {value}")
        if kind == "tn":
            grid = [int(v) for v in grid]

        metrics = payload.get("metrics", ["K", "W"])
        if not isinstance(metrics, list) or not metrics:
            raise ConfigError("metrics", "ожидается непустой список")
        for tag in metrics:
            if tag not in METRICS:
                raise ConfigError("metrics", f"неизвестная метрика {tag!r} (доступны: {', '.join(METRICS)})")

        output_path = payload.get("output_path", _default_output(defaults.output_dir, kind, payload["summand"]))
        if not isinstance(output_path, str) or not output_path:
            raise ConfigError("output_path", "ожидается непустая строка")
        threads = payload.get("threads")
        if threads is not None and (not isinstance(threads, int) or threads < 1):
            raise ConfigError("threads", "ожидается положительное целое")
        quantile_gap = payload.get("quantile_gap")
        if quantile_gap is not None and (not isinstance(quantile_gap, (int, float)) or quantile_gap < 0):
            raise ConfigError("quantile_gap", "ожидается неотрицательное число")
        coupling_pairs = payload.get("coupling_pairs", 0)
        if not isinstance(coupling_pairs, int) or coupling_pairs < 0:
            raise ConfigError("coupling_pairs", "ожидается неотрицательное целое")
        if coupling_pairs and kind != "geometric":
            raise ConfigError("coupling_pairs", "пары (S, S^L) строятся только для геометрических сумм")

        return cls(
            kind=kind,
            seed=seed,
            replications=replications,
            summand=payload["summand"],
            grid=list(grid),
            metrics=list(metrics),
            output_path=output_path,
            threads=threads,
            quantile_gap=None if quantile_gap is None else float(quantile_gap),
            coupling_pairs=coupling_pairs,
        )

    def with_seed(self, seed: int) -> "ExperimentConfig":
        payload = self.to_json()
        payload["seed"] = seed
        return ExperimentConfig.from_dict(payload)

    def with_output(self, output_path: str) -> "ExperimentConfig":
        payload = self.to_json()
        payload["output_path"] = output_path
        return ExperimentConfig.from_dict(payload)

    def to_json(self) -> Dict[str, Any]:
        return {name: getattr(self, name) for name in self.__dataclass_fields__ if name != "spec"}
