import numpy as np
import pytest

from app.stein.test_functions import FAMILIES, family, indicator, smoothed_indicator, sine
from app.utils.errors import DomainError

GRID = np.linspace(-8.0, 8.0, 2001)


def test_families_declare_valid_norms():
    for name in FAMILIES:
        functions = family(name)
        assert functions
        for h in functions:
            assert h.check_norms(GRID), h.name


def test_indicator_values():
    h = indicator(0.5)
    assert h(np.array([0.0, 0.5, 1.0])).tolist() == [1.0, 1.0, 0.0]
    assert h.bounded and not h.lipschitz
    assert h.tilde_norm(0.3) == pytest.approx(0.7)


def test_smoothed_indicator_shape():
    h = smoothed_indicator(1.0, 0.5)
    assert h(np.array([0.0, 0.75, 2.0])).tolist() == pytest.approx([1.0, 0.5, 0.0])
    assert h.lip == 2.0
    assert h.kinks == (0.5, 1.0)
    with pytest.raises(DomainError):
        smoothed_indicator(0.0, 0.0)


def test_unbounded_tilde_norm_is_infinite():
    h = family("lipschitz")[1]
    assert not h.bounded
    assert h.tilde_norm(0.0) == float("inf")


def test_unknown_family_and_zero_frequency():
    with pytest.raises(DomainError):
        family("polynomial")
    with pytest.raises(DomainError):
        sine(0.0)
