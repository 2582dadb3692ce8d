"""Truncated Laurent series and the expansion at infinity."""

from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wsigma.curve import WCurve, peval
from wsigma.errors import LogTermError, OrderUnderflow
from wsigma.series import LaurentSeries, expand_at_infinity, poly_series

fracs = st.fractions(min_value=-5, max_value=5, max_denominator=7)


@st.composite
def series(draw, unit=False):
    v = 0 if unit else draw(st.integers(-3, 3))
    coeffs = draw(st.lists(fracs, min_size=6, max_size=6))
    if unit or coeffs[0] == 0:
        coeffs[0] = Fraction(1) if coeffs[0] == 0 else coeffs[0]
    return LaurentSeries(v, tuple(coeffs))


@settings(max_examples=80, deadline=None)
@given(series(), series())
def test_ring_identities(a, b):
    assert ((a * b) / b - a).is_zero
    assert ((a + b) - b - a).is_zero
    assert (a * b - b * a).is_zero


@settings(max_examples=50, deadline=None)
@given(series(unit=True))
def test_inverse_and_powers(a):
    one = a * a.inverse()
    assert one[0] == 1 and all(one[k] == 0 for k in range(1, one.prec))
    assert a.unit_power(3) == a**3
    b = a * (1 / a[0])  # exact rational roots need a_0 = 1
    h = b.unit_power(Fraction(1, 2))
    assert h * h == b


def test_derivative_integral_and_residue():
    s = LaurentSeries(-2, (Fraction(1), Fraction(3), Fraction(0), Fraction(5)))
    assert s.residue() == 3
    with pytest.raises(LogTermError):
        s.integral()
    t = LaurentSeries(0, (Fraction(1), Fraction(2), Fraction(3)))
    assert t.integral().derivative() == t


def test_precision_guard():
    s = LaurentSeries(0, (Fraction(1), Fraction(2)))
    with pytest.raises(OrderUnderflow):
        s[2]


@pytest.mark.parametrize(
    "curve",
    [
        WCurve(2, 3, {(2, 1): 1}),
        WCurve(2, 5, {(1, 2): 1, (2, 0): -1, (2, 3): -2, (1, 0): 3}),
        WCurve(3, 4, {(3, 0): -1, (1, 1): 2}),
        WCurve(3, 5, {(3, 0): -1, (3, 2): 1}),
    ],
)
def test_expansion_lies_on_curve(curve):
    E = expand_at_infinity(curve, 20)
    fval = poly_series(curve.f, E)
    # f(x(t), y(t)) vanishes to the known precision
    assert fval.is_zero
    assert E.x.valuation == -curve.r and E.y.valuation == -curve.s
    assert E.x.leading() == 1 and E.y.leading() == 1


def test_exact_and_float_expansions_agree():
    curve = WCurve(2, 5, {(2, 0): -1, (2, 1): Fraction(1, 3)})
    Ee, Ef = expand_at_infinity(curve, 16), expand_at_infinity(curve, 16, exact=False)
    for k in range(Ee.y.valuation, Ee.y.prec):
        assert abs(complex(Ee.y[k]) - Ef.y[k]) < 1e-12


def test_series_evaluation_near_infinity():
    curve = WCurve(2, 3, {(2, 1): 1})
    E = expand_at_infinity(curve, 30, exact=False)
    t = 0.05
    x, y = E.x.evaluate(t), E.y.evaluate(t)
    assert abs(peval(curve.f, x, y)) < 1e-9 * abs(y) ** 2
