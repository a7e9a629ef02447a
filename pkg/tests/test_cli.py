import json
from pathlib import Path

import pytest
from typer.testing import CliRunner

from app.cli.cli import app

runner = CliRunner()


def _json(result):
    assert result.exit_code == 0, result.output
    return json.loads(result.stdout)


def test_constants_json():
    payload = _json(runner.invoke(app, ["constants", "--json"]))
    assert payload["x_star"] == pytest.approx(1.3607221, abs=1e-6)
    assert payload["pl79"] == pytest.approx(8.6408, abs=1e-4)
    assert payload["ghjk2"]["printed"] == 11.56
    assert all(row["ok"] for row in payload["audit"])


def test_constants_table():
    result = runner.invoke(app, ["constants"])
    assert result.exit_code == 0
    assert "x_star=1.360722" in result.output


def test_bounds_geometric():
    payload = _json(runner.invoke(app, ["bounds", "--summand", "rademacher", "--p", "0.01", "--Q", "1", "--json"]))
    bounds = {b["name"]: b for b in payload["bounds"]}
    assert bounds["wedfg"]["bound"] == pytest.approx(0.94219, abs=1e-5)
    assert bounds["rwrwa"]["bound"] == pytest.approx(0.26667, abs=1e-5)
    assert "bvc5" in bounds and "wedf" in bounds


def test_bounds_tn():
    payload = _json(runner.invoke(app, ["bounds", "--n", "10", "--json"]))
    names = {b["name"] for b in payload["bounds"]}
    assert {"thm2-K", "thm2-W", "thm2-d12", "thm2-K-composed", "berry-esseen"} <= names


def test_bounds_argument_errors():
    assert runner.invoke(app, ["bounds", "--p", "0.1", "--n", "5"]).exit_code == 2
    assert runner.invoke(app, ["bounds", "--summand", "cauchy", "--p", "0.1"]).exit_code == 2
    assert runner.invoke(app, ["bounds", "--p", "1.5"]).exit_code == 2


def test_stein_check_smooth_family():
    payload = _json(runner.invoke(app, ["stein-check", "--family", "smooth", "--points", "11", "--json"]))
    assert payload["passed"] is True
    assert len(payload["results"]) == 4


def test_stein_check_rejects_bad_arguments():
    assert runner.invoke(app, ["stein-check", "--points", "0"]).exit_code == 2
    assert runner.invoke(app, ["stein-check", "--family", "polynomial"]).exit_code == 2
    assert runner.invoke(app, ["stein-check", "--b=-1"]).exit_code == 2


def test_metrics_range():
    payload = _json(runner.invoke(app, ["metrics", "--n-min", "2", "--n-max", "5", "--json"]))
    assert [row["n"] for row in payload["rows"]] == [2, 3, 4, 5]
    assert payload["passed"] is True
    assert runner.invoke(app, ["metrics", "--n-min", "5", "--n-max", "3"]).exit_code == 2


def test_study_config_errors(tmp_path):
    assert runner.invoke(app, ["study", "--config", str(tmp_path / "missing.json")]).exit_code == 2
    broken = tmp_path / "broken.json"
    broken.write_text("[1, 2", encoding="utf-8")
    assert runner.invoke(app, ["study", "--config", str(broken)]).exit_code == 2


def test_study_runs_with_overrides(tmp_path):
    config = tmp_path / "study.json"
    config.write_text(
        json.dumps(
            {
                "kind": "geometric",
                "seed": 1,
                "replications": 10000,
                "summand": {"name": "uniform"},
                "grid": [0.2, 0.1, 0.05, 0.02],
                "output_path": str(tmp_path / "ignored.csv"),
                "threads": 1,
            }
        ),
        encoding="utf-8",
    )
    out = tmp_path / "results" / "uniform.csv"
    result = runner.invoke(app, ["study", "--config", str(config), "--seed", "3", "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert out.exists()
    assert not (tmp_path / "ignored.csv").exists()


def test_study_runs_bundled_config(tmp_path):
    payload = json.loads((Path(__file__).parents[1] / "data" / "geom_rademacher.json").read_text(encoding="utf-8"))
    payload.update(replications=20_000, grid=[0.2, 0.1], threads=1, output_path=str(tmp_path / "geom.csv"))
    config = tmp_path / "geom_rademacher.json"
    config.write_text(json.dumps(payload), encoding="utf-8")
    result = runner.invoke(app, ["study", "--config", str(config)])
    assert result.exit_code == 0, result.output
    assert (tmp_path / "geom.csv").exists()
