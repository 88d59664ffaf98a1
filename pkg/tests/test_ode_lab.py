from __future__ import annotations

import numpy as np
import pytest

from app.core.errors import BoundaryS, ConfigError, SDividesZero, UnsupportedParameterRange
from app.models.phi import PhiSpec, QSpec, phi_jet
from app.services import ode_lab
from app.services.ode_lab import OdeCheck, run_ode_check


@pytest.mark.parametrize("c, b_sq, s", [(2.0, 1.0, 0.5), (1.0, 2.0, 0.7)])
def test_berwald_q_solves_trivial_ode(c, b_sq, s):
    assert abs(ode_lab.residual_trivial_ode(QSpec.berwald(c, b_sq), s, b_sq)) <= 1e-12


def test_zero_q_is_not_a_solution():
    residual = ode_lab.residual_trivial_ode(QSpec.linear(0.0, 0.0, 1.0), 0.5, 1.0)
    assert residual == pytest.approx(2 / 0.75)


def test_trivial_ode_guards():
    with pytest.raises(SDividesZero):
        ode_lab.residual_trivial_ode(QSpec.linear(1.0, 0.0, 1.0), 0.0, 1.0)
    with pytest.raises(BoundaryS):
        ode_lab.residual_trivial_ode(QSpec.linear(1.0, 0.0, 1.0), 1.0, 1.0)


@pytest.mark.parametrize("q", [QSpec.linear(1.0, 0.0, 1.0), QSpec.linear(0.0, 1.0, 1.0), QSpec.linear(-0.7, 0.3, 1.0)])
def test_linear_q_solves_landsberg_ode(q):
    for s in (-0.8, -0.2, 0.5, 0.9):
        assert abs(ode_lab.residual_landsberg_ode(q, s, 1.0)) <= 1e-12


def test_quadratic_q_is_not_a_solution():
    assert ode_lab.residual_landsberg_ode(QSpec.polynomial([0.0, 0.0, 1.0]), 0.5, 1.0) == pytest.approx(1.25)


def test_residual_report_skips_singular_samples():
    report = ode_lab.ode_residual_report(QSpec.linear(1.0, 0.5, 0.36), 0.36, [0.0, 0.3])
    assert report.residual_trivial[0] is None
    assert report.residual_landsberg[1] == pytest.approx(0.0, abs=1e-12)


def test_shen_berwald_phi_check():
    report = ode_lab.shen_berwald_phi_check(2.0, 1.0, list(np.linspace(0.1, 0.9, 9)))
    assert report.passed
    assert report.deviations["q_round_trip"] <= 1e-10


def test_shen_berwald_degenerate_parameters():
    with pytest.raises(UnsupportedParameterRange):
        ode_lab.shen_berwald_phi_check(1.0, 1.0, [0.5])


def test_shen_landsberg_phi_check():
    grid = list(np.linspace(-0.5, 0.5, 17))
    grid = [s for s in grid if abs(s) > 1e-9]
    report = ode_lab.shen_landsberg_phi_check(1.0, 0.5, 0.36, grid)
    assert report.passed
    assert report.deviations["Phi_plus_m2Psi"] <= 1e-9


def test_constant_member_of_landsberg_family():
    report = ode_lab.shen_landsberg_phi_check(0.0, 0.0, 0.36, [0.1, 0.3], c3=2.0)
    assert report.phi_quadrature == pytest.approx([2.0, 2.0])


def test_special_closed_form():
    report = ode_lab.special_phi_report(1.0, 0.36, list(np.linspace(0.06, 0.54, 9)))
    assert report.passed
    assert report.deviations["ratio_spread"] <= 1e-7
    assert report.deviations["printed_ratio_spread"] > 1e-7
    flat = ode_lab.special_phi_report(0.0, 0.36, [0.1, 0.2, 0.3])
    assert flat.passed


def test_special_closed_form_range():
    with pytest.raises(UnsupportedParameterRange):
        ode_lab.special_phi_c2_zero(2.0, 1.0, 0.5)


def test_asanov_and_reparameterized_forms():
    assert ode_lab.asanov_check(1.0, [-0.7, -0.2, 0.3, 0.8]).passed
    report = ode_lab.shen_berwald_reparameterized_check(2.0, 1.0, [0.2, 0.5, 0.8])
    assert report.passed
    assert report.deviations["max_ratio_minus_one"] <= 1e-12


def test_run_ode_check_dispatch():
    report = run_ode_check(OdeCheck.residuals, {}, q=QSpec.berwald(2.0, 1.0), grid_size=9)
    assert report.max_abs["trivial"] <= 1e-10
    assert run_ode_check(OdeCheck.shen_landsberg, {"k": 0.6, "c": 0.5, "b0": 0.6}, grid_size=9).passed
    with pytest.raises(ConfigError):
        run_ode_check(OdeCheck.shen_berwald, {"c": 2.0})
    with pytest.raises(ConfigError):
        run_ode_check(OdeCheck.residuals, {})


def test_arctan_jet_follows_its_q_to_fourth_order():
    c1, b_sq = 1.0, 0.36
    from_q = PhiSpec.general_q(QSpec.linear(c1=0.0, c2=c1, b_sq=b_sq))
    for s in np.linspace(0.03, 0.57, 50):
        closed = ode_lab.special_phi_jet(c1, b_sq, float(s)).derivatives
        reference = phi_jet(from_q, float(s)).derivatives
        np.testing.assert_allclose(closed / closed[0], reference / reference[0], rtol=1e-9, atol=1e-10)
