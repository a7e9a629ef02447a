"""Специальные функции: лог-гамма, отношения гамм, erf, обрывающаяся 2F1"""

import math
from numbers import Integral

import numpy as np
from scipy import special

from ..utils.errors import DomainError


def log_gamma(x: float) -> float:
    """ln Г(x) для x > 0"""
    if not x > 0:
        raise DomainError(f"log_gamma определена только при x > 0, получено {x}")
    return float(special.gammaln(x))


def gamma_ratio(a: float, b: float) -> float:
    """Г(a)/Г(b) через разность логарифмов (не переполняется при больших n)"""
    if not (a > 0 and b > 0):
        raise DomainError(f"gamma_ratio требует a, b > 0, получено a={a}, b={b}")
    return math.exp(special.gammaln(a) - special.gammaln(b))


def erf(x):
    """Функция ошибок; принимает скаляр или массив"""
    out = special.erf(x)
    return float(out) if np.ndim(out) == 0 else out


def _is_nonpositive_integer(value) -> bool:
    if isinstance(value, Integral):
        return value <= 0
    return float(value).is_integer() and value <= 0


def hyp2f1_terminating(a: float, b, c: float, x: float) -> float:
    """
    Гауссова гипергеометрическая функция 2F1(a, b; c; x) при целом b <= 0

    Ряд обрывается после -b + 1 членов и суммируется точно (math.fsum).

    Args:
        a: первый параметр
        b: неположительное целое (в оценке для d_W(U_n, U) это 3 - n)
        c: не может быть неположительным целым
        x: аргумент
    """
    if not _is_nonpositive_integer(b):
        raise DomainError(f"b должно быть неположительным целым, получено {b}")
    if _is_nonpositive_integer(c):
        raise DomainError(f"c не может быть неположительным целым, получено {c}")
    m = -int(b)
    terms = [1.0]
    term = 1.0
    for j in range(m):
        term *= (a + j) * (b + j) / ((c + j) * (j + 1)) * x
        terms.append(term)
    return math.fsum(terms)
