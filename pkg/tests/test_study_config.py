import json

import pytest

from app.config.study_config import ExperimentConfig
from app.document_loaders.config_loader import StudyConfigLoader
from app.utils.errors import ConfigError, ConfigFileNotFound

BASE = {
    "kind": "geometric",
    "seed": 7,
    "replications": 10_000,
    "summand": {"name": "rademacher", "params": {"sigma": 1.0}},
    "grid": [0.1, 0.05],
    "output_path": "results/out.csv",
}


def _with(**changes):
    payload = dict(BASE)
    payload.update(changes)
    return payload


def test_valid_config_defaults():
    config = ExperimentConfig.from_dict(BASE)
    assert config.metrics == ["K", "W"]
    assert config.coupling_pairs == 0
    assert config.spec.name == "rademacher"
    assert "spec" not in config.to_json()


@pytest.mark.parametrize(
    "changes, field",
    [
        ({"kind": "poisson"}, "kind"),
        ({"seed": -1}, "seed"),
        ({"seed": 2**64}, "seed"),
        ({"replications": 100}, "replications"),
        ({"grid": []}, "grid"),
        ({"grid": [0.1, 1.5]}, "grid"),
        ({"metrics": ["K", "TV"]}, "metrics"),
        ({"threads": 0}, "threads"),
        ({"quantile_gap": -1.0}, "quantile_gap"),
        ({"colour": "red"}, "colour"),
        ({"summand": {"name": "cauchy"}}, "summand.name"),
    ],
)
def test_invalid_fields_are_named(changes, field):
    with pytest.raises(ConfigError) as err:
        ExperimentConfig.from_dict(_with(**changes))
    assert err.value.field == field


def test_missing_field_is_named():
    payload = dict(BASE)
    del payload["grid"]
    with pytest.raises(ConfigError) as err:
        ExperimentConfig.from_dict(payload)
    assert err.value.field == "grid"


def test_tn_grid_must_be_integers():
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict(_with(kind="tn", grid=[2.5]))
    config = ExperimentConfig.from_dict(_with(kind="tn", grid=[5.0, 10]))
    assert config.grid == [5, 10]
    with pytest.raises(ConfigError) as err:
        ExperimentConfig.from_dict(_with(kind="tn", grid=[5], coupling_pairs=1000))
    assert err.value.field == "coupling_pairs"


def test_overrides_revalidate():
    config = ExperimentConfig.from_dict(BASE)
    assert config.with_seed(99).seed == 99
    assert config.with_output("elsewhere.csv").output_path == "elsewhere.csv"
    with pytest.raises(ConfigError):
        config.with_seed(-5)


def test_loader(tmp_path):
    path = tmp_path / "study.json"
    path.write_text(json.dumps(BASE), encoding="utf-8")
    assert StudyConfigLoader(str(path)).load().grid == [0.1, 0.05]


def test_loader_missing_file():
    with pytest.raises(ConfigFileNotFound):
        StudyConfigLoader("not_exists.json").load()


def test_loader_bad_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{\"kind\": ", encoding="utf-8")
    with pytest.raises(ConfigError) as err:
        StudyConfigLoader(str(path)).load()
    assert err.value.field == "json"


def test_environment_supplies_optional_fields(monkeypatch):
    monkeypatch.setenv("STEIN_SEED", "11")
    monkeypatch.setenv("STEIN_REPLICATIONS", "20000")
    monkeypatch.setenv("STEIN_OUTPUT_DIR", "runs")
    payload = {k: v for k, v in BASE.items() if k not in ("seed", "replications", "output_path")}
    config = ExperimentConfig.from_dict(payload)
    assert config.seed == 11
    assert config.replications == 20_000
    assert config.output_path.replace("\\", "/") == "runs/geometric_rademacher.csv"
