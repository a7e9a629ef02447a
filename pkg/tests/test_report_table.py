import json
import math

import numpy as np
import pandas as pd

from app.bounds.report import BoundReport
from app.memory.report_table import COLUMNS, NpEncoder, ReportTable
from app.metrics.distances import DistanceEstimate


def _table():
    table = ReportTable()
    report = BoundReport("rwrwa", {"p": 0.1}, 0.3, metric="W")
    table.add_report(0.1, report.with_empirical(DistanceEstimate(0.05, 0.01, "exact-empirical")))
    table.add_report(0.1, BoundReport("pike-ren", {"p": 0.1}, 0.9, metric="BW"))
    table.add_report(0.05, report.with_empirical(DistanceEstimate(0.5, 0.01, "exact-empirical")))
    return table


def test_rows_and_violations():
    table = _table()
    assert len(table.rows) == 3
    assert math.isnan(table.rows[1]["empirical"])
    assert table.rows[1]["satisfied"] is None
    assert [row["param"] for row in table.violations()] == [0.05]
    assert len(table.get_rows("W")) == 2


def test_frame_columns():
    frame = _table().to_frame()
    assert list(frame.columns) == COLUMNS
    assert frame["bound_tag"].tolist() == ["rwrwa", "pike-ren", "rwrwa"]


def test_write_csv_and_sidecar(tmp_path):
    target = tmp_path / "nested" / "study.csv"
    path = _table().write(str(target), {"seed": np.int64(3), "slope": np.float64(0.5)})
    assert path == target
    frame = pd.read_csv(target)
    assert frame.shape == (3, len(COLUMNS))
    sidecar = json.loads(target.with_suffix(".json").read_text(encoding="utf-8"))
    assert sidecar == {"seed": 3, "slope": 0.5}


def test_encoder_handles_numpy_and_reports():
    payload = {"a": np.arange(3), "b": np.bool_(True), "c": DistanceEstimate(0.1, 0.0, "grid")}
    decoded = json.loads(json.dumps(payload, cls=NpEncoder))
    assert decoded == {"a": [0, 1, 2], "b": True, "c": {"value": 0.1, "error_bound": 0.0, "method": "grid"}}
