import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from app.models.specfun import erf, gamma_ratio, hyp2f1_terminating, log_gamma
from app.utils.errors import DomainError


def test_log_gamma_factorial():
    assert log_gamma(5.0) == pytest.approx(math.log(24.0))


def test_log_gamma_rejects_nonpositive():
    with pytest.raises(DomainError):
        log_gamma(0.0)


def test_gamma_ratio_small_and_large_arguments():
    assert gamma_ratio(10.5, 10.0) == pytest.approx(math.gamma(10.5) / math.gamma(10.0), rel=1e-12)
    # Г(n + 1/2)/Г(n) ~ sqrt(n) без переполнения
    assert gamma_ratio(1000.5, 1000.0) == pytest.approx(math.sqrt(1000.0), rel=1e-3)


def test_erf_scalar_and_array():
    assert isinstance(erf(0.5), float)
    assert erf(0.0) == 0.0
    assert erf([0.0, 10.0]).tolist() == pytest.approx([0.0, 1.0])


def test_hyp2f1_short_series():
    assert hyp2f1_terminating(-0.5, 0, 0.5, 2 / 3) == 1.0
    assert hyp2f1_terminating(-0.5, -1, 0.5, 0.5) == pytest.approx(1.5)
    assert hyp2f1_terminating(1.0, -1, 1.0, 0.3) == pytest.approx(0.7)


def test_hyp2f1_rejects_bad_parameters():
    with pytest.raises(DomainError):
        hyp2f1_terminating(1.0, 0.5, 1.0, 0.1)
    with pytest.raises(DomainError):
        hyp2f1_terminating(1.0, -2, -1.0, 0.1)


@settings(max_examples=60, deadline=None)
@given(
    a=st.floats(0.1, 5.0),
    m=st.integers(0, 12),
    c=st.floats(0.5, 5.0),
    x=st.floats(-1.0, 0.0),
)
def test_hyp2f1_matches_scipy(a, m, c, x):
    expected = float(special.hyp2f1(a, -m, c, x))
    assert hyp2f1_terminating(a, -m, c, x) == pytest.approx(expected, rel=1e-9, abs=1e-12)


@settings(max_examples=80, deadline=None)
@given(x=st.floats(-6.0, 6.0, allow_nan=False))
def test_erf_is_odd(x):
    assert erf(-x) == pytest.approx(-erf(x), abs=1e-15)


@settings(max_examples=80, deadline=None)
@given(x=st.floats(0.05, 150.0))
def test_log_gamma_recurrence(x):
    assert log_gamma(x + 1.0) == pytest.approx(log_gamma(x) + math.log(x), rel=1e-12, abs=1e-12)
