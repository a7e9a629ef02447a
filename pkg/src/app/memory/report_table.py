import json
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional

import numpy as np
import pandas as pd

from ..bounds.report import BoundReport

COLUMNS = ["param", "metric", "empirical", "error", "bound_tag", "bound", "satisfied"]


class NpEncoder(json.JSONEncoder):
    def default(self, obj):
        if isinstance(obj, np.integer):
            return int(obj)
        if isinstance(obj, np.floating):
            return float(obj)
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        if isinstance(obj, np.bool_):
            return bool(obj)
        if obj is pd.NA:
            return None
        if hasattr(obj, "to_json"):
            return obj.to_json()
        try:
            return super().default(obj)
        except TypeError:
            return str(obj)


class ReportTable:
    """Накопленные строки исследования: точка сетки, расстояние, оценка"""

    def __init__(self):
        self.rows: List[Dict[str, Any]] = []

    def add(
        self,
        param: float,
        metric: str,
        empirical: float,
        error: float,
        bound_tag: str,
        bound: float,
        satisfied: Optional[bool],
    ) -> None:
        self.rows.append(
            {
                "param": param,
                "metric": metric,
                "empirical": empirical,
                "error": error,
                "bound_tag": bound_tag,
                "bound": bound,
                "satisfied": satisfied,
            }
        )

    def add_report(self, param: float, report: BoundReport) -> None:
        """Строка из BoundReport; без эмпирической оценки empirical и error пусты"""
        estimate = report.empirical
        self.add(
            param,
            report.metric,
            np.nan if estimate is None else estimate.value,
            np.nan if estimate is None else estimate.error_bound,
            report.name,
            report.bound,
            report.satisfied,
        )

    def extend(self, param: float, reports: Iterable[BoundReport]) -> None:
        for report in reports:
            self.add_report(param, report)

    def violations(self) -> List[Dict[str, Any]]:
        """Строки, где эмпирическое расстояние минус погрешность больше оценки"""
        return [row for row in self.rows if row["satisfied"] is False]

    def get_rows(self, metric: Optional[str] = None) -> List[Dict[str, Any]]:
        if metric is None:
            return list(self.rows)
        return [row for row in self.rows if row["metric"] == metric]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows, columns=COLUMNS)

    def write(self, path: str, sidecar: Dict[str, Any]) -> Path:
        """Пишет CSV и JSON с тем же именем; возвращает путь CSV"""
        target = Path(path)
        try:
            target.parent.mkdir(parents=True, exist_ok=True)
            self.to_frame().to_csv(target, index=False)
            target.with_suffix(".json").write_text(
                json.dumps(sidecar, ensure_ascii=False, indent=2, cls=NpEncoder), encoding="utf-8"
            )
        except OSError as e:
            raise OSError(f"не удалось записать результаты в {target}: {e}") from e
        return target
