from fractions import Fraction
from math import factorial

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from lieduflo.series import Series, sinh_series

small = st.fractions(min_value=-3, max_value=3, max_denominator=4)


def test_sinh_coefficients():
    s = sinh_series(7)
    assert s.coeffs == [0, 1, 0, Fraction(1, 6), 0, Fraction(1, 120), 0, Fraction(1, 5040)]


def test_drop_leading_and_scaling():
    s = sinh_series(5).drop_leading()
    assert s.order == 4 and s[0] == 1 and s[2] == Fraction(1, 6)
    assert s.substitute_scaled(2)[2] == Fraction(4, 6)
    with pytest.raises(ValueError):
        s.drop_leading()


def test_exp_of_x():
    e = Series([0, 1], 6).exp()
    assert e.coeffs == [Fraction(1, factorial(k)) for k in range(7)]


def test_log_of_one_plus_x():
    l = Series([1, 1], 5).log()
    assert l.coeffs == [0, 1, Fraction(-1, 2), Fraction(1, 3), Fraction(-1, 4), Fraction(1, 5)]


def test_domain_errors():
    with pytest.raises(ValueError):
        Series([2, 1], 3).log()
    with pytest.raises(ValueError):
        Series([1, 1], 3).exp()
    with pytest.raises(IndexError):
        Series([1], 2)[3]
    with pytest.raises(ValueError):
        Series([], -1)


@settings(max_examples=50, deadline=None)
@given(st.lists(small, min_size=1, max_size=6))
def test_exp_log_inverse(tail):
    f = Series([0] + tail, 6)
    assert f.exp().log() == f


@settings(max_examples=50, deadline=None)
@given(st.lists(small, max_size=5), st.lists(small, max_size=5))
def test_log_of_product(a, b):
    f, g = Series([1] + a, 5), Series([1] + b, 5)
    assert (f * g).log() == f.log() + g.log()


def test_numeric_agreement_of_sinh_ratio():
    s = sinh_series(30).drop_leading()
    x = Fraction(1, 3)
    approx = sum(c * x ** k for k, c in enumerate(s.coeffs))
    exact = mpmath.sinh(mpmath.mpf(1) / 3) * 3
    assert abs(mpmath.mpf(approx.numerator) / approx.denominator - exact) < mpmath.mpf(10) ** -30
