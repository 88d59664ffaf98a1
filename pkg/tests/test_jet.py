from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from app.core.errors import OutOfDomain
from app.models.jet import ScalarJet, power_derivatives


def test_power_derivatives_of_cube():
    assert power_derivatives(2.0, 3, 3) == [8.0, 12.0, 12.0, 6.0]


def test_fractional_power_needs_positive_base():
    with pytest.raises(OutOfDomain):
        power_derivatives(-1.0, 0.5, 2)


def test_variable_and_constant():
    x = ScalarJet.variable(0.5, 4)
    assert x.derivatives.tolist() == [0.5, 1.0, 0.0, 0.0, 0.0]
    c = ScalarJet.constant(3.0, 2)
    assert c.order == 2 and c.value == 3.0


def test_product_and_quotient_round_trip():
    x = ScalarJet.variable(0.7, 4)
    back = (x * x) / x
    np.testing.assert_allclose(back.coeffs, x.coeffs, atol=1e-15)


def test_exp_matches_analytic():
    d = (2.0 * ScalarJet.variable(0.4, 4)).exp().derivatives
    np.testing.assert_allclose(d, [math.exp(0.8) * 2.0**k for k in range(5)], rtol=1e-13)


def test_atan_derivatives_at_zero():
    d = ScalarJet.variable(0.0, 4).atan().derivatives
    np.testing.assert_allclose(d, [0.0, 1.0, 0.0, -2.0, 0.0], atol=1e-15)


def test_derivative_and_truncate():
    x = ScalarJet.variable(2.0, 4)
    cube = x**3
    assert cube.derivative().derivatives.tolist() == pytest.approx([12.0, 12.0, 6.0, 0.0])
    assert cube.truncate(1).derivatives.tolist() == pytest.approx([8.0, 12.0])


def test_from_derivatives():
    jet = ScalarJet.from_derivatives([1.0, 2.0, 6.0])
    assert jet.coeffs.tolist() == pytest.approx([1.0, 2.0, 3.0])


@given(st.floats(min_value=0.1, max_value=3.0))
def test_reciprocal_matches_analytic(t):
    d = (1.0 / ScalarJet.variable(t, 4)).derivatives
    expected = [1 / t, -1 / t**2, 2 / t**3, -6 / t**4, 24 / t**5]
    np.testing.assert_allclose(d, expected, rtol=1e-12)


@given(st.floats(min_value=-2.0, max_value=2.0))
def test_sqrt_of_one_plus_square(s):
    d = (1.0 + ScalarJet.variable(s, 2) ** 2).sqrt().derivatives
    root = math.sqrt(1 + s * s)
    np.testing.assert_allclose(d, [root, s / root, 1 / root**3], rtol=1e-12)
