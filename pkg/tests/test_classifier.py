from __future__ import annotations

import pytest

from app.core.errors import DimensionTooSmall, EmptyGrid
from app.fixtures import load_fixture
from app.models.phi import PhiSpec
from app.services.classifier import (
    classify,
    default_grid,
    riemannian_test,
    sigma_t_condition_test,
    t_condition_test,
)


def test_default_grid_avoids_zero_and_boundary():
    grid = default_grid(PhiSpec.randers(), 0.36)
    assert len(grid) == 33
    assert sum(s < 0 for s in grid) == 17
    assert all(0.05 * 0.6 * 0.99 < abs(s) < 0.95 * 0.6 * 1.01 for s in grid)
    positive = default_grid(PhiSpec.kropina(), 0.64, 9)
    assert len(positive) == 9 and min(positive) > 0


def test_grid_outside_domain_is_empty():
    # sqrt(k2 / -k1) = 0.01 leaves no node inside the domain.
    with pytest.raises(EmptyGrid):
        default_grid(PhiSpec.riemannian(-10000.0, 1.0), 0.36, 5)


def test_riemannian_fit_recovers_parameters(standard):
    spec = PhiSpec.riemannian(2.0, 3.0)
    result = riemannian_test(standard, spec, default_grid(spec, standard.b_sq))
    assert result.passed and result.consistent
    assert (result.k1, result.k2) == pytest.approx((2.0, 3.0), abs=1e-9)


def test_randers_is_not_riemannian(standard):
    spec = PhiSpec.randers()
    result = riemannian_test(standard, spec, default_grid(spec, standard.b_sq))
    assert not result.passed
    assert result.rho1 == pytest.approx(1.0)


def test_unit_phi_is_riemannian(standard):
    assert classify(standard, PhiSpec.riemannian(0.0, 1.0)).kind == "Riemannian"


def test_berwald_type_satisfies_t_condition(berwald_point):
    spec = PhiSpec.shen_berwald(2.0, 1.0)
    result = t_condition_test(berwald_point, spec, default_grid(spec, 1.0))
    assert result.passed and result.converse_ok and result.fit_ok
    assert result.berwald_c == pytest.approx(2.0, abs=1e-8)
    assert max(result.Psi, result.Omega) <= 1e-9


def test_randers_fails_t_condition(standard):
    spec = PhiSpec.randers()
    assert not t_condition_test(standard, spec, default_grid(spec, standard.b_sq)).passed


def test_landsberg_type_satisfies_sigma_t_condition(standard):
    spec = PhiSpec.shen_landsberg(1.0, 0.5, standard.b_sq)
    result = sigma_t_condition_test(standard, spec, default_grid(spec, standard.b_sq))
    assert result.passed
    assert result.sigma_contraction <= 1e-9
    assert result.condition_c <= 1e-12


@pytest.mark.parametrize(
    "fixture_name, spec, kind",
    [
        ("standard", PhiSpec.riemannian(1.0, 1.0), "Riemannian"),
        ("berwald", PhiSpec.shen_berwald(2.0, 1.0), "TCondition"),
        ("standard", PhiSpec.shen_landsberg(1.0, 0.5, 0.36), "SigmaTCondition"),
        ("standard", PhiSpec.randers(), "General"),
        ("kropina", PhiSpec.kropina(), "General"),
    ],
)
def test_verdicts(fixture_name, spec, kind):
    verdict = classify(load_fixture(fixture_name), spec)
    assert verdict.kind == kind
    assert verdict.dim_ok


def test_berwald_sigma_t_holds_through_t_condition(berwald_point):
    verdict = classify(berwald_point, PhiSpec.shen_berwald(2.0, 1.0))
    assert verdict.sigma_t_condition.passed


def test_verdict_ignores_direction_scale_and_c3(standard):
    spec = PhiSpec.shen_landsberg(1.0, 0.5, 0.36)
    assert classify(standard, spec, scale=3.0).kind == "SigmaTCondition"
    assert classify(standard, spec.with_c3(0.25)).kind == "SigmaTCondition"


def test_plane_fixture():
    plane = load_fixture("plane")
    with pytest.raises(DimensionTooSmall):
        classify(plane, PhiSpec.randers())
    assert classify(plane, PhiSpec.randers(), strict=False).dim_ok is False
