class DomainError(ValueError):
    """Ошибка: аргумент вне области определения функции или закона"""

    pass


class MissingMomentError(ValueError):
    """Ошибка: для оценки не хватает момента слагаемого"""

    def __init__(self, bound: str, moment: str):
        self.bound = bound
        self.moment = moment
        super().__init__(f"Оценка {bound} требует момент {moment}, но он не задан")


class QuadratureError(ArithmeticError):
    """Ошибка: адаптивная квадратура не сошлась"""

    def __init__(self, message: str, x: float | None = None):
        self.x = x
        if x is not None:
            message = f"{message} (x={x:.10g})"
        super().__init__(message)


class ConfigError(ValueError):
    """Ошибка: некорректная конфигурация эксперимента"""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"Поле '{field}': {message}")


class ConfigFileNotFound(FileNotFoundError):
    """Ошибка: файл конфигурации не найден"""

    pass


class BoundViolation(AssertionError):
    """Ошибка: эмпирическое расстояние превышает доказанную оценку"""

    pass
