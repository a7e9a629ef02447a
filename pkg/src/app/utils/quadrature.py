from typing import Callable, Iterable, Tuple

import numpy as np
from scipy import integrate

from .errors import QuadratureError

EPSABS = 1e-11
EPSREL = 1e-11


def quad_split(
    f: Callable[[float], float],
    a: float,
    b: float,
    points: Iterable[float] = (),
    epsabs: float = EPSABS,
    epsrel: float = EPSREL,
    limit: int = 400,
) -> Tuple[float, float]:
    """
    Интеграл f по [a, b] с разбиением в точках излома

    Каждый кусок между соседними точками считается отдельно адаптивной
    квадратурой Гаусса-Кронрода; бесконечные концы допустимы.

    Returns:
        (значение, оценка абсолютной ошибки)
    """
    if a == b:
        return 0.0, 0.0
    cuts = sorted({a, b, *(float(p) for p in points if a < p < b)})
    value = 0.0
    error = 0.0
    for left, right in zip(cuts[:-1], cuts[1:]):
        piece, err = integrate.quad(
            lambda t: float(f(t)), left, right, epsabs=epsabs, epsrel=epsrel, limit=limit
        )
        value += piece
        error += err
    if not np.isfinite(value):
        raise QuadratureError("интеграл не сошёлся", a if np.isfinite(a) else b)
    return value, error
