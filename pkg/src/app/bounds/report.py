from dataclasses import dataclass, field, replace
from typing import Any, Dict, Optional

from ..metrics.distances import DistanceEstimate
from ..utils.errors import BoundViolation, DomainError


@dataclass(frozen=True)
class BoundReport:
    """
    Значение доказанной оценки и, если есть, эмпирическое расстояние

    Args:
        name: метка неравенства (wedfg, rwrwa, eskol, ...)
        inputs: параметры, из которых посчитана оценка
        bound: значение правой части
        empirical: измеренная левая часть с погрешностью
        metric: расстояние, которое оценивается (K, W, BW, d2, d12, norm)
        note: пометка (comparison, iid_only, printed, recomputed)
    """

    name: str
    inputs: Dict[str, Any]
    bound: float
    empirical: Optional[DistanceEstimate] = None
    metric: str = ""
    note: str = ""
    extras: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not self.bound >= 0:
            raise DomainError(f"оценка {self.name} отрицательна: {self.bound}")

    @property
    def satisfied(self) -> Optional[bool]:
        if self.empirical is None:
            return None
        return bool(self.empirical.value - self.empirical.error_bound <= self.bound)

    @property
    def ratio(self) -> Optional[float]:
        """Отношение измеренной величины к оценке"""
        if self.empirical is None:
            return None
        if self.bound == 0:
            return 0.0 if self.empirical.value == 0 else float("inf")
        return self.empirical.value / self.bound

    def with_empirical(self, estimate: DistanceEstimate) -> "BoundReport":
        return replace(self, empirical=estimate)

    def require(self) -> "BoundReport":
        """Бросает BoundViolation, если оценка нарушена"""
        if self.satisfied is False:
            raise BoundViolation(
                f"{self.name}: {self.empirical.value:.6g} - {self.empirical.error_bound:.3g} > {self.bound:.6g}"
            )
        return self

    def to_json(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "metric": self.metric,
            "inputs": self.inputs,
            "bound": self.bound,
            "empirical": None if self.empirical is None else self.empirical.to_json(),
            "satisfied": self.satisfied,
            "note": self.note,
            **self.extras,
        }
