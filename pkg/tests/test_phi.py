from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from pydantic import ValidationError

from app.core.errors import OrderTooHigh, OutOfDomain, PoleOnPath, UnsupportedParameterRange
from app.models.phi import PhiFamily, PhiSpec, QSpec, phi_from_q, phi_jet, q_from_phi, regularity_check


def test_randers_jet():
    assert phi_jet(PhiSpec.randers(), 0.5).derivatives[:4].tolist() == pytest.approx([1.5, 1.0, 0.0, 0.0])


def test_kropina_jet():
    assert phi_jet(PhiSpec.kropina(), 0.5).derivatives[:3].tolist() == pytest.approx([2.0, -4.0, 16.0])


def test_riemannian_jet():
    d = phi_jet(PhiSpec.riemannian(1.0, 1.0), 1.0).derivatives
    assert d[0] == pytest.approx(math.sqrt(2)) and d[1] == pytest.approx(1 / math.sqrt(2))


def test_c3_scales_the_jet():
    d = phi_jet(PhiSpec.randers(c3=2.0), 0.5).derivatives
    assert d[0] == pytest.approx(3.0)


@given(
    st.floats(min_value=-2.0, max_value=2.0),
    st.floats(min_value=0.5, max_value=3.0),
    st.floats(min_value=-0.9, max_value=0.9),
)
def test_riemannian_jet_matches_analytic(k1, k2, s):
    spec = PhiSpec.riemannian(k1, k2)
    if not spec.domain().contains(s) or k1 * s * s + k2 < 0.1:
        return
    f = math.sqrt(k1 * s * s + k2)
    d = phi_jet(spec, s).derivatives
    assert d[1] == pytest.approx(k1 * s / f, rel=1e-12, abs=1e-14)
    assert d[2] == pytest.approx(k1 * k2 / f**3, rel=1e-12, abs=1e-14)


@given(st.floats(min_value=0.05, max_value=0.95))
def test_shen_berwald_jet_matches_analytic(s):
    # c = 2, b^2 = 1: phi = s^(1/2) (2 - 2 s^2)^(1/4)
    spec = PhiSpec.shen_berwald(2.0, 1.0)
    f = math.sqrt(s) * (2 - 2 * s * s) ** 0.25
    df = f * (0.5 / s - 0.5 * s / (1 - s * s))
    d = phi_jet(spec, s).derivatives
    assert d[0] == pytest.approx(f, rel=1e-12)
    assert d[1] == pytest.approx(df, rel=1e-11)


def test_jet_from_q_matches_square_root_profile():
    # Q = s integrates to phi proportional to sqrt(1 + s^2).
    spec = PhiSpec.shen_landsberg(0.0, 1.0, 0.36)
    d = phi_jet(spec, 0.3).derivatives
    assert d[1] / d[0] == pytest.approx(0.3 / 1.09, rel=1e-12)
    assert d[2] / d[0] == pytest.approx(1 / 1.09**2, rel=1e-12)
    assert phi_jet(spec, spec.s_ref()).value == pytest.approx(1.0)


def test_order_and_domain_errors():
    with pytest.raises(OrderTooHigh):
        phi_jet(PhiSpec.randers(), 0.1, order=5)
    with pytest.raises(OutOfDomain):
        phi_jet(PhiSpec.kropina(), -0.2)


def test_q_from_phi_examples():
    assert q_from_phi(PhiSpec.riemannian(1.0, 1.0), 0.5).value == pytest.approx(0.5)
    assert q_from_phi(PhiSpec.kropina(), 0.5).value == pytest.approx(-1.0)
    assert q_from_phi(PhiSpec.randers(), 0.0).value == pytest.approx(1.0)


def test_phi_from_q_examples():
    assert phi_from_q(QSpec.polynomial([0.0, 1.0]), 1.0, s_ref=0.0) == pytest.approx(math.sqrt(2), rel=1e-10)
    kropina_q = QSpec.from_phi(PhiSpec.kropina())
    assert phi_from_q(kropina_q, 2.0, s_ref=1.0) == pytest.approx(0.5, rel=1e-10)
    assert phi_from_q(QSpec.linear(1.0, 0.5, 0.36), 0.2, s_ref=0.2, c3=3.0) == pytest.approx(3.0)


def test_phi_from_q_detects_pole():
    # 1 + sQ = 1 - s^2 / 0.25 vanishes at s = 0.5.
    with pytest.raises(PoleOnPath):
        phi_from_q(QSpec.polynomial([0.0, -4.0]), 0.8, s_ref=0.0)


def test_missing_params_are_a_validation_error():
    with pytest.raises(ValidationError):
        PhiSpec(family=PhiFamily.riemannian, params={"k1": 1.0})


def test_berwald_needs_cb2_above_one():
    with pytest.raises(UnsupportedParameterRange):
        PhiSpec.shen_berwald(1.0, 1.0)


def test_normalized_landsberg_conversion():
    spec = PhiSpec.shen_landsberg_normalized(k=0.6, c=0.5, b0=0.6)
    assert spec.params == pytest.approx({"c1": 1.0, "c2": 0.5, "b_sq": 0.36})
    assert PhiSpec.asanov(2.0).params == pytest.approx({"c1": 2.0, "c2": 0.0, "b_sq": 1.0})


def test_spec_serializes_as_json():
    dumped = PhiSpec.shen_landsberg(1.0, 0.5, 0.36).model_dump(mode="json")
    assert dumped == {"family": "shen_landsberg", "params": {"c1": 1.0, "c2": 0.5, "b_sq": 0.36}, "c3": 1.0}
    again = PhiSpec.model_validate(PhiSpec.general_q(QSpec.berwald(2.0, 1.0)).model_dump(mode="json"))
    assert again.q_spec().kind.value == "berwald"


def test_regularity_randers_is_regular():
    report = regularity_check(PhiSpec.randers(), 0.36, 1.0, list(np.linspace(-0.9, 0.9, 19)))
    assert report.classification == "regular"


def test_regularity_sqrt_linear_fails_denominator():
    report = regularity_check(PhiSpec.sqrt_linear(1.0, 1.0, 0.36), 0.36, 1.0, [0.1, 0.3, 0.5])
    assert report.classification == "irregular"
    assert not any(sample.denominator_ok for sample in report.samples)


def test_regularity_kropina_is_positively_almost_regular():
    report = regularity_check(PhiSpec.kropina(), 0.64, 1.0, list(np.linspace(0.05, 0.75, 8)))
    assert report.classification == "positively-almost-regular"


def test_regularity_berwald_is_flagged():
    report = regularity_check(PhiSpec.shen_berwald(2.0, 1.0), 1.0, 1.0, list(np.linspace(0.05, 0.95, 10)))
    assert report.classification == "irregular"
    assert all(sample.phi_positive for sample in report.samples)


def _randers_derivatives(s):
    return [1.0 + s, 1.0, 0.0, 0.0, 0.0]


def _kropina_derivatives(s):
    return [1 / s, -1 / s**2, 2 / s**3, -6 / s**4, 24 / s**5]


def _sqrt_linear_derivatives(s, c1=0.5, c2=1.0, b_sq=0.36):
    r = math.sqrt(b_sq - s * s)
    return [
        c1 * s + c2 * r,
        c1 - c2 * s / r,
        -c2 * b_sq / r**3,
        -3 * c2 * b_sq * s / r**5,
        -3 * c2 * b_sq * (r * r + 5 * s * s) / r**7,
    ]


@pytest.mark.parametrize(
    "spec, analytic, grid",
    [
        (PhiSpec.randers(), _randers_derivatives, np.linspace(-0.9, 0.9, 50)),
        (PhiSpec.kropina(), _kropina_derivatives, np.linspace(0.1, 0.9, 50)),
        (PhiSpec.sqrt_linear(0.5, 1.0, 0.36), _sqrt_linear_derivatives, np.linspace(-0.5, 0.5, 50)),
    ],
    ids=["randers", "kropina", "sqrt_linear"],
)
def test_jet_matches_analytic_derivatives_to_fourth_order(spec, analytic, grid):
    for s in grid:
        np.testing.assert_allclose(phi_jet(spec, float(s)).derivatives, analytic(float(s)), rtol=1e-10, atol=1e-12)


@pytest.mark.parametrize(
    "q",
    [QSpec.linear(1.0, 0.5, 1.0), QSpec.berwald(2.0, 1.0)],
    ids=["linear", "berwald"],
)
def test_q_survives_the_phi_reconstruction(q):
    spec = PhiSpec.general_q(q)
    s_ref = spec.s_ref()
    h = 1e-5
    for s in np.linspace(s_ref - 0.3, s_ref + 0.3, 13):
        s = float(s)
        assert q_from_phi(spec, s).value == pytest.approx(q.value(s), rel=1e-10, abs=1e-12)
        assert q_from_phi(spec.with_c3(3.7), s).value == pytest.approx(q_from_phi(spec, s).value, rel=1e-13)
        phi, ahead, behind = (phi_from_q(q, t) for t in (s, s + h, s - h))
        slope = (ahead - behind) / (2 * h)
        assert slope / (phi - s * slope) == pytest.approx(q.value(s), rel=1e-6, abs=1e-6)
