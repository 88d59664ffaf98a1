from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from app.core.errors import DimensionMismatch
from app.fixtures import load_fixture
from app.models.geometry import realize_direction
from app.models.multidual import MultiDual
from app.models.phi import PhiSpec
from app.services.ad_oracle import (
    Oracle,
    compare,
    f_squared,
    oracle_cartan,
    oracle_metric,
    oracle_t,
)
from app.services.tensor_engine import PointState

UNIT = PhiSpec.riemannian(0.0, 1.0)


def test_unit_phi_f_squared(standard):
    args = [MultiDual.constant(v) for v in (1.0, 0.0, 0.0)]
    assert f_squared(standard, args, UNIT).real == pytest.approx(1.0)
    assert Oracle(standard, [1.0, 0.0, 0.0], UNIT).F() == pytest.approx(1.0)
    assert np.max(np.abs(oracle_cartan(standard, [1.0, 0.2, 0.0], UNIT).components)) < 1e-14


def test_f_squared_is_two_homogeneous(standard, sample_y):
    spec = PhiSpec.randers()
    one = Oracle(standard, sample_y, spec).F()
    two = Oracle(standard, 2 * sample_y, spec).F()
    assert two**2 == pytest.approx(4 * one**2)


def test_randers_metric_and_cartan_match_closed_form(standard, sample_y):
    spec = PhiSpec.randers()
    state = PointState(standard, sample_y, spec)
    np.testing.assert_allclose(oracle_metric(standard, sample_y, spec), state.metric_lower(), atol=1e-10)
    np.testing.assert_allclose(oracle_cartan(standard, sample_y, spec).to_dense(), state.cartan_dense, atol=1e-10)


def test_cartan_has_degree_minus_one(standard, sample_y):
    spec = PhiSpec.randers()
    one = oracle_cartan(standard, sample_y, spec).to_dense()
    two = oracle_cartan(standard, 2 * sample_y, spec).to_dense()
    np.testing.assert_allclose(two, 0.5 * one, atol=1e-12)


def test_riemannian_oracle_t_vanishes(standard, sample_y):
    assert oracle_t(standard, sample_y, PhiSpec.riemannian(1.0, 1.0)).tensor.max_abs() < 1e-12


@pytest.mark.parametrize(
    "fixture_name, spec",
    [("standard", PhiSpec.randers()), ("kropina_point", PhiSpec.kropina())],
)
def test_oracle_t_matches_closed_form(request, fixture_name, spec):
    mp = request.getfixturevalue(fixture_name)
    y = realize_direction(mp, 0.5, np.random.default_rng(3))
    state = PointState(mp, y, spec)
    result = oracle_t(mp, y, spec)
    report = compare(state.t_lower(), result.tensor, terms=result.terms)
    assert report.max_rel <= 1e-9
    assert set(report.terms) == {"F_dC", "F_CC", "C_ell"}


def test_cartan_derivative_matches_oracle(skewed, rng):
    spec = PhiSpec.shen_landsberg(1.0, 0.5, skewed.b_sq)
    y = realize_direction(skewed, 0.3 * skewed.b_norm, rng)
    closed = PointState(skewed, y, spec).cartan_derivative()
    assert compare(closed, Oracle(skewed, y, spec).cartan_derivative()).max_rel <= 1e-9


def test_compare_identical_and_single_slot():
    a = np.arange(16.0).reshape(2, 2, 2, 2)
    same = compare(a, a)
    assert (same.max_abs, same.max_rel) == (0.0, 0.0)
    b = a.copy()
    b[1, 0, 1, 1] += 1e-6
    report = compare(b, a)
    assert report.max_abs == pytest.approx(1e-6, rel=1e-6)
    assert report.argmax == [1, 0, 1, 1]


def test_compare_shape_mismatch():
    with pytest.raises(DimensionMismatch):
        compare(np.zeros((2, 2)), np.zeros((3, 3)))


def _metric_along(oracle: Oracle, v: np.ndarray) -> np.ndarray:
    """Half the derivative of the oracle metric along ``v``, through a third dual unit."""
    n = oracle.mp.dim
    out = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            args = []
            for k, value in enumerate(oracle.y):
                units = [u for u, axis in enumerate((i, j)) if axis == k]
                arg = MultiDual.seeded(float(value), units)
                arg.coeffs[1 << 2] += v[k]
                args.append(arg)
            out[i, j] = 0.5 * 0.5 * oracle._fn(args).coefficient(0b111)
    return out


@pytest.mark.parametrize(
    "fixture_name, spec",
    [
        ("standard", PhiSpec.randers()),
        ("kropina", PhiSpec.kropina()),
        ("landsberg", PhiSpec.shen_landsberg(1.0, 0.5, 0.36)),
    ],
)
@given(
    fraction=st.floats(min_value=0.2, max_value=0.9),
    seed=st.integers(min_value=0, max_value=2**16),
)
def test_oracle_cartan_is_half_the_metric_derivative(fixture_name, spec, fraction, seed):
    mp = load_fixture(fixture_name)
    rng = np.random.default_rng(seed)
    y = realize_direction(mp, fraction * mp.b_norm, rng)
    v = rng.standard_normal(mp.dim)
    v /= np.linalg.norm(v)
    oracle = Oracle(mp, y, spec)
    cartan = oracle.cartan()
    expected = np.einsum("ijk,k->ij", cartan, v)
    scale = max(1.0, float(np.max(np.abs(cartan))))
    np.testing.assert_allclose(_metric_along(oracle, v), expected, atol=1e-11 * scale)


def test_compare_floors_the_relative_scale_at_one():
    small = compare(np.full((2, 2), 1e-3 + 1e-8), np.full((2, 2), 1e-3))
    assert small.max_rel == pytest.approx(small.max_abs)
    large = compare(np.full((2, 2), 100.0 + 1e-6), np.full((2, 2), 100.0))
    assert large.max_rel == pytest.approx(1e-8, rel=1e-6)
