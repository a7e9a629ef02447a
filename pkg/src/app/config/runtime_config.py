import os

from dotenv import load_dotenv

from ..utils.errors import ConfigError

load_dotenv()


class RuntimeConfig:
    """Параметры окружения для численных экспериментов"""

    def __init__(self):
        self.threads: int = int(os.getenv("STEIN_THREADS", str(os.cpu_count() or 1)))
        self.seed: int = int(os.getenv("STEIN_SEED", "20200101"))
        self.replications: int = int(os.getenv("STEIN_REPLICATIONS", "1000000"))
        self.output_dir: str = os.getenv("STEIN_OUTPUT_DIR", "results")
        self.log_level: str = os.getenv("STEIN_LOG_LEVEL", "WARNING")

    def validate_config(self) -> bool:
        """Проверяет корректность конфигурации"""
        if self.threads < 1:
            raise ConfigError("STEIN_THREADS", "размер пула должен быть положительным")
        if self.replications < 1:
            raise ConfigError(
                "STEIN_REPLICATIONS", "число повторений должно быть положительным"
            )
        if not 0 <= self.seed < 2**64:
            raise ConfigError("STEIN_SEED", "зерно должно быть 64-битным целым")
        return True


def get_runtime_config() -> RuntimeConfig:
    """Получает проверенную конфигурацию окружения"""
    config = RuntimeConfig()
    config.validate_config()
    return config
