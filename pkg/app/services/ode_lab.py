"""Residual checks of the Q-equations, their closed-form solutions and the
phi reconstructions built from them."""

from __future__ import annotations

import logging
import math
from enum import Enum
from typing import Sequence

import numpy as np

from app.core.config import settings
from app.core.errors import BoundaryS, ConfigError, OutOfDomain, PoleOnPath, SDividesZero, UnsupportedParameterRange, guard
from app.models.geometry import make_metric_point, realize_direction
from app.models.jet import ScalarJet
from app.models.phi import PhiSpec, QSpec, phi_from_q, phi_jet, q_from_phi
from app.schemas.reports import OdeResidualReport, PhiCheckReport
from app.services.classifier import DEFAULT_GRID_SIZE, chebyshev_nodes, default_grid
from app.services.tensor_engine import PointState

logger = logging.getLogger(__name__)

ROUND_TRIP_TOL = 1e-9
IDENTITY_TOL = 1e-10
RATIO_TOL = 1e-8
SPECIAL_RATIO_TOL = 1e-7
SIGMA_T_TOL = 1e-9


def _m_sq(s: float, b_sq: float) -> float:
    m_sq = b_sq - s * s
    if m_sq <= settings.GUARD:
        raise BoundaryS(f"s = {s:.6g} is on or beyond |s| = b = {math.sqrt(b_sq):.6g}")
    return m_sq


def residual_trivial_ode(q: QSpec, s: float, b_sq: float) -> float:
    """``Q' + (1/s + 2s/m^2) Q + 2/m^2``."""
    guard("s", s, error=SDividesZero)
    m_sq = _m_sq(s, b_sq)
    qj = q.jet(s, 1)
    value, slope = qj.derivatives
    return float(slope + (1.0 / s + 2.0 * s / m_sq) * value + 2.0 / m_sq)


def residual_landsberg_ode(q: QSpec, s: float, b_sq: float) -> float:
    """``(b^2 - s^2) Q'' - s Q' + Q``."""
    m_sq = _m_sq(s, b_sq)
    value, slope, curvature = q.jet(s, 2).derivatives
    return float(m_sq * curvature - s * slope + value)


def _safe(fn, *args) -> float | None:
    try:
        return fn(*args)
    except (SDividesZero, BoundaryS, OutOfDomain):
        return None


def _max_or_none(values: Sequence[float | None]) -> float | None:
    finite = [abs(v) for v in values if v is not None]
    return max(finite) if finite else None


def ode_residual_report(q: QSpec, b_sq: float, grid: Sequence[float]) -> OdeResidualReport:
    trivial = [_safe(residual_trivial_ode, q, s, b_sq) for s in grid]
    landsberg = [_safe(residual_landsberg_ode, q, s, b_sq) for s in grid]
    return OdeResidualReport(
        q=q.model_dump(mode="json"),
        b_sq=b_sq,
        grid=list(grid),
        residual_trivial=trivial,
        residual_landsberg=landsberg,
        max_abs={"trivial": _max_or_none(trivial), "landsberg": _max_or_none(landsberg)},
    )


def _ratio_spread(ratios: Sequence[float]) -> float:
    r = np.asarray(ratios)
    return float((np.max(r) - np.min(r)) / abs(np.mean(r)))


def shen_berwald_phi_check(c: float, b_sq: float, grid: Sequence[float], c3: float = 1.0) -> PhiCheckReport:
    cb2 = c * b_sq
    if cb2 <= 1.0:
        raise UnsupportedParameterRange(f"the Berwald-type phi needs c b^2 > 1, got {cb2:.6g}")
    spec = PhiSpec.shen_berwald(c, b_sq, c3)
    q = QSpec.berwald(c, b_sq)
    s_ref = math.sqrt(b_sq) / 2
    closed, quadrature, ratios = [], [], []
    q_dev = one_plus_dev = log_dev = 0.0
    for s in grid:
        if not 0 < s < math.sqrt(b_sq):
            raise OutOfDomain(f"grid sample s = {s:.6g} lies outside (0, b)")
        q_phi = q_from_phi(spec, s, 0).value
        q_closed = q.value(s)
        q_dev = max(q_dev, abs(q_phi - q_closed))
        w = 1.0 + s * q_closed
        one_plus_dev = max(one_plus_dev, abs(w - (cb2 - c * s * s)))
        log_dev = max(log_dev, abs(q_closed / w - (1.0 / s - 1.0 / (c * s * (b_sq - s * s)))))
        phi_c = phi_jet(spec, s, 0).value
        phi_q = phi_from_q(q, s, s_ref)
        closed.append(phi_c)
        quadrature.append(phi_q)
        ratios.append(phi_c / phi_q)
    deviations = {
        "q_round_trip": q_dev,
        "one_plus_sQ": one_plus_dev,
        "log_derivative": log_dev,
        "ratio_spread": _ratio_spread(ratios),
    }
    passed = (
        q_dev <= ROUND_TRIP_TOL
        and one_plus_dev <= IDENTITY_TOL
        and log_dev <= IDENTITY_TOL
        and deviations["ratio_spread"] <= RATIO_TOL
    )
    return PhiCheckReport(
        name="shen_berwald",
        params={"c": c, "b_sq": b_sq, "c3": c3},
        grid=list(grid),
        phi_closed=closed,
        phi_quadrature=quadrature,
        ratio=ratios,
        deviations=deviations,
        passed=passed,
    )


def shen_landsberg_phi_check(
    c1: float, c2: float, b_sq: float, grid: Sequence[float], c3: float = 1.0, name: str = "shen_landsberg"
) -> PhiCheckReport:
    """Round-trip Q and check the sigmaT residuals on the phi with Q = c1 sqrt(b^2 - s^2) + c2 s."""

    spec = PhiSpec.shen_landsberg(c1, c2, b_sq, c3)
    q = spec.q_spec()
    for s in grid:
        if 1.0 + s * q.value(s) <= settings.GUARD:
            raise PoleOnPath(f"1 + sQ(s) <= 0 at grid sample s = {s:.6g}")
    b = math.sqrt(b_sq)
    mp = make_metric_point(np.eye(3), [b, 0.0, 0.0], max(1.0, b))
    q_dev = sigma_a = sigma_b = 0.0
    values = []
    for s in grid:
        q_dev = max(q_dev, abs(q_from_phi(spec, s, 0).value - q.value(s)))
        state = PointState(mp, realize_direction(mp, s), spec)
        coeffs, m2 = state.coefficients, state.geo.m_sq
        sigma_a = max(sigma_a, abs(coeffs.Phi + m2 * coeffs.Psi))
        sigma_b = max(sigma_b, abs(3 * coeffs.Psi + m2 * coeffs.Omega))
        values.append(state.phi)
    deviations = {"q_round_trip": q_dev, "Phi_plus_m2Psi": sigma_a, "threePsi_plus_m2Omega": sigma_b}
    passed = q_dev <= ROUND_TRIP_TOL and sigma_a <= SIGMA_T_TOL and sigma_b <= SIGMA_T_TOL
    return PhiCheckReport(
        name=name,
        params={"c1": c1, "c2": c2, "b_sq": b_sq, "c3": c3},
        grid=list(grid),
        phi_quadrature=values,
        deviations=deviations,
        passed=passed,
    )


def asanov_check(k: float, grid: Sequence[float]) -> PhiCheckReport:
    """The unit-length one-form member with no linear term."""
    spec = PhiSpec.asanov(k)
    p = spec.params
    return shen_landsberg_phi_check(p["c1"], p["c2"], p["b_sq"], grid, name="asanov")


def _arctan_jet(c1: float, b_sq: float, s: float, order: int, printed: bool) -> ScalarJet:
    x = ScalarJet.variable(s, order)
    r = (b_sq - x * x).sqrt()
    k = math.sqrt(4.0 - c1 * c1 * b_sq * b_sq)
    inner = c1 * b_sq * r if printed else c1 * x * r
    angle = ((c1 * b_sq * r + 2.0 * x) / (k * r)).atan()
    return (1.0 + inner).sqrt() * (c1 * b_sq / k * angle).exp()


def special_phi_jet(c1: float, b_sq: float, s: float, order: int = 4) -> ScalarJet:
    """Jet of the closed-form phi whose Q is c1 sqrt(b^2 - s^2)."""
    if 4.0 - c1 * c1 * b_sq * b_sq <= 0:
        raise UnsupportedParameterRange(f"the arctan form needs c1^2 b^4 < 4, got {c1 * c1 * b_sq * b_sq:.6g}")
    if not 0 < s < math.sqrt(b_sq):
        raise OutOfDomain(f"s = {s:.6g} lies outside (0, b)")
    return _arctan_jet(c1, b_sq, s, order, printed=False)


def special_phi_c2_zero(c1: float, b_sq: float, s: float) -> float:
    return special_phi_jet(c1, b_sq, s, 0).value


def special_phi_report(c1: float, b_sq: float, grid: Sequence[float]) -> PhiCheckReport:
    q = QSpec.linear(c1=0.0, c2=c1, b_sq=b_sq)
    closed, quadrature, ratios, printed_ratios = [], [], [], []
    for s in grid:
        phi_c = special_phi_c2_zero(c1, b_sq, s)
        phi_q = phi_from_q(q, s)
        closed.append(phi_c)
        quadrature.append(phi_q)
        ratios.append(phi_c / phi_q)
        printed_ratios.append(_arctan_jet(c1, b_sq, s, 0, printed=True).value / phi_q)
    deviations = {"ratio_spread": _ratio_spread(ratios), "printed_ratio_spread": _ratio_spread(printed_ratios)}
    if deviations["printed_ratio_spread"] > SPECIAL_RATIO_TOL:
        logger.info("the printed arctan form drifts from the quadrature (spread %.3g)", deviations["printed_ratio_spread"])
    return PhiCheckReport(
        name="special_c2_zero",
        params={"c1": c1, "b_sq": b_sq},
        grid=list(grid),
        phi_closed=closed,
        phi_quadrature=quadrature,
        ratio=ratios,
        deviations=deviations,
        passed=deviations["ratio_spread"] <= SPECIAL_RATIO_TOL,
    )


def shen_berwald_reparameterized(c1p: float, c2p: float, s: float) -> float:
    """``s^{c1'/(c1'+1)} (1 + c1' + c2' s^2)^{1/(2(c1'+1))}``."""
    return s ** (c1p / (c1p + 1.0)) * (1.0 + c1p + c2p * s * s) ** (1.0 / (2.0 * (c1p + 1.0)))


def shen_berwald_reparameterized_check(c: float, b_sq: float, grid: Sequence[float]) -> PhiCheckReport:
    """Compare the (c1', c2') = (c b^2 - 1, -c) form with the internal Berwald-type phi."""
    spec = PhiSpec.shen_berwald(c, b_sq)
    c1p, c2p = c * b_sq - 1.0, -c
    closed, internal, ratios = [], [], []
    for s in grid:
        phi_r = shen_berwald_reparameterized(c1p, c2p, s)
        phi_i = phi_jet(spec, s, 0).value
        closed.append(phi_r)
        internal.append(phi_i)
        ratios.append(phi_r / phi_i)
    spread = _ratio_spread(ratios)
    return PhiCheckReport(
        name="shen_berwald_reparameterized",
        params={"c": c, "b_sq": b_sq, "c1_prime": c1p, "c2_prime": c2p},
        grid=list(grid),
        phi_closed=closed,
        phi_quadrature=internal,
        ratio=ratios,
        deviations={"ratio_spread": spread, "max_ratio_minus_one": float(np.max(np.abs(np.array(ratios) - 1.0)))},
        passed=spread <= RATIO_TOL,
    )


class OdeCheck(str, Enum):
    residuals = "residuals"
    shen_berwald = "shen-berwald"
    shen_landsberg = "shen-landsberg"
    special = "special"
    asanov = "asanov"
    reparameterized = "reparameterized"


def _need(params: dict[str, float], *names: str) -> list[float]:
    missing = [n for n in names if n not in params]
    if missing:
        raise ConfigError(f"missing params: {', '.join(missing)}")
    return [float(params[n]) for n in names]


def run_ode_check(
    check: OdeCheck,
    params: dict[str, float],
    q: QSpec | None = None,
    grid: Sequence[float] | None = None,
    grid_size: int = DEFAULT_GRID_SIZE,
) -> OdeResidualReport | PhiCheckReport:
    """Dispatch one named check; ``grid`` defaults to the check's Chebyshev grid."""

    logger.info("ode-check %s with %s", check.value, params)
    match check:
        case OdeCheck.residuals:
            if q is None:
                raise ConfigError("the residuals check needs a Q specification")
            b_sq = float(params.get("b_sq", q.params.get("b_sq", 1.0)))
            if grid is None:
                grid = default_grid(PhiSpec.general_q(q), b_sq, grid_size)
            return ode_residual_report(q, b_sq, grid)
        case OdeCheck.shen_berwald:
            c, b_sq = _need(params, "c", "b_sq")
            c3 = float(params.get("c3", 1.0))
            if grid is None:
                grid = default_grid(PhiSpec.shen_berwald(c, b_sq), b_sq, grid_size)
            return shen_berwald_phi_check(c, b_sq, grid, c3)
        case OdeCheck.shen_landsberg:
            if "k" in params:
                spec = PhiSpec.shen_landsberg_normalized(*_need(params, "k", "c", "b0"))
            else:
                spec = PhiSpec.shen_landsberg(*_need(params, "c1", "c2", "b_sq"))
            p = spec.params
            if grid is None:
                grid = default_grid(spec, p["b_sq"], grid_size)
            return shen_landsberg_phi_check(p["c1"], p["c2"], p["b_sq"], grid, float(params.get("c3", 1.0)))
        case OdeCheck.special:
            c1, b_sq = _need(params, "c1", "b_sq")
            if grid is None:
                b = math.sqrt(b_sq)
                grid = [float(s) for s in chebyshev_nodes(0.05 * b, 0.95 * b, grid_size)]
            return special_phi_report(c1, b_sq, grid)
        case OdeCheck.asanov:
            k = float(params.get("k", 1.0))
            if grid is None:
                grid = default_grid(PhiSpec.asanov(k), 1.0, grid_size)
            return asanov_check(k, grid)
        case OdeCheck.reparameterized:
            c, b_sq = _need(params, "c", "b_sq")
            if grid is None:
                grid = default_grid(PhiSpec.shen_berwald(c, b_sq), b_sq, grid_size)
            return shen_berwald_reparameterized_check(c, b_sq, grid)
    raise AssertionError(check)
