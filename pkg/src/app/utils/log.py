import logging

from rich.console import Console
from rich.logging import RichHandler

_CONFIGURED = False


def setup_logging(level: str = "WARNING") -> None:
    """Подключает RichHandler к корневому логгеру пакета (один раз)"""
    global _CONFIGURED
    logger = logging.getLogger("app")
    logger.setLevel(level.upper())
    if _CONFIGURED:
        return
    handler = RichHandler(console=Console(stderr=True), show_path=False, rich_tracebacks=False)
    handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
    logger.addHandler(handler)
    logger.propagate = False
    _CONFIGURED = True


def get_logger(name: str) -> logging.Logger:
    """Возвращает логгер модуля внутри иерархии 'app'"""
    if not name.startswith("app"):
        name = f"app.{name}"
    return logging.getLogger(name)
