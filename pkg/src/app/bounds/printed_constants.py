"""
Округлённые константы оценок

Каждая константа хранится в напечатанном виде и вместе с определением, по
которому её можно пересчитать. Оценки используют напечатанное значение,
пересчёт нужен для контроля расхождения.
"""

import math
from dataclasses import dataclass
from typing import Callable, Dict, List

from ..models.specfun import log_gamma

# (7/2 + sqrt(10)) + 3(1 + sqrt(2/5))
C_SMOOTH = 11.56
C_BERRY_ESSEEN = 0.5600
C_BERRY_ESSEEN_IID = 0.4748
C_UN_WASSERSTEIN = 11.49
C_PRODUCT_WASSERSTEIN = 9.168
C_RAYLEIGH_XF = 2.325
C_RAYLEIGH_FPRIME = 6.11
C_RAYLEIGH_XFPP = 11.30
C_RAYLEIGH_SCALED = 8.6408

KOLMOGOROV_SMOOTH = 3.5 + math.sqrt(10.0)
KOLMOGOROV_TAIL = 3.0 * (1.0 + math.sqrt(0.4))


def chi_sup_constant(k: float) -> float:
    """Г(k/2) e^{k/2} / (2 (k/2)^{k/2}) через логарифмы"""
    half = k / 2.0
    return math.exp(log_gamma(half) + half - half * math.log(half)) / 2.0


def _rayleigh() -> Dict[str, float]:
    from ..stein.chi import rayleigh_constants

    c = rayleigh_constants()
    return {"xf": c.c_xf, "fprime": c.c_fprime, "xfpp": c.c_xfpp}


@dataclass(frozen=True)
class PrintedConstant:
    """Напечатанная константа и функция её пересчёта"""

    tag: str
    printed: float
    definition: str
    recompute: Callable[[], float]
    # допустимое расхождение: половина единицы последнего напечатанного разряда
    tolerance: float

    def audit(self) -> Dict[str, object]:
        value = self.recompute()
        return {
            "tag": self.tag,
            "printed": self.printed,
            "recomputed": value,
            "definition": self.definition,
            "drift": value - self.printed,
            "ok": abs(value - self.printed) <= self.tolerance,
        }


PRINTED_CONSTANTS: List[PrintedConstant] = [
    PrintedConstant(
        "ghjk2", C_SMOOTH, "(7/2+sqrt(10)) + 3(1+sqrt(2/5))",
        lambda: KOLMOGOROV_SMOOTH + KOLMOGOROV_TAIL, 5e-3,
    ),
    PrintedConstant("berry-esseen", C_BERRY_ESSEEN, "C_0 (внешняя константа)", lambda: C_BERRY_ESSEEN, 0.0),
    PrintedConstant("pl14", C_UN_WASSERSTEIN, "внешняя константа", lambda: C_UN_WASSERSTEIN, 0.0),
    PrintedConstant(
        "thm2-W", C_PRODUCT_WASSERSTEIN, "0.7979 * 11.49 (E|V|/sigma * pl14)",
        lambda: 0.7979 * C_UN_WASSERSTEIN, 5e-4,
    ),
    PrintedConstant(
        "pl79", C_RAYLEIGH_SCALED, "6.11 * 2^{3/2} / 2",
        lambda: C_RAYLEIGH_FPRIME * 2**1.5 / 2.0, 1e-4,
    ),
    PrintedConstant("bound3", C_RAYLEIGH_XF, "I_1(x*)/rho_R(x*)", lambda: _rayleigh()["xf"], 5e-4),
    PrintedConstant(
        "bound4", C_RAYLEIGH_FPRIME, "Г(3/2)e^{3/2}/(2(3/2)^{3/2}) (1 + 2 * 2.325)",
        lambda: _rayleigh()["fprime"], 5e-3,
    ),
    PrintedConstant("bound5", C_RAYLEIGH_XFPP, "2(1 + 2 * 2.325)", lambda: _rayleigh()["xfpp"], 5e-3),
]


def audit_constants() -> List[Dict[str, object]]:
    """Сверка всех напечатанных констант с их определениями"""
    return [c.audit() for c in PRINTED_CONSTANTS]
