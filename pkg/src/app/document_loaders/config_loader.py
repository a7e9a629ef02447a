import json
from pathlib import Path

from app.config.study_config import ExperimentConfig
from app.utils.errors import ConfigError, ConfigFileNotFound


class StudyConfigLoader:
    """Загрузчик конфигурации исследования из JSON"""

    def __init__(self, path: str):
        self.path = Path(path)

    def load(self) -> ExperimentConfig:
        if not self.path.exists():
            raise ConfigFileNotFound(f"Файл не найден: {self.path}")
        try:
            payload = json.loads(self.path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ConfigError("json", f"{self.path}: строка {e.lineno}, столбец {e.colno}: {e.msg}") from e
        return ExperimentConfig.from_dict(payload)
