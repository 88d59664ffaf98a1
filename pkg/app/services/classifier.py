"""Numerical decision procedures for the Riemannian, T- and sigmaT-conditions.

Every test runs over an s-grid at one metric point. Each grid value ``s`` is
realized by a direction with ``beta / alpha = s`` exactly, and verdicts are
grid maxima of absolute residuals compared against ``tol``.
"""

from __future__ import annotations

import logging
import math
from typing import Sequence

import numpy as np

from app.core.config import settings
from app.core.errors import DimensionTooSmall, EmptyGrid, OutOfDomain, SDividesZero
from app.models.geometry import MetricPoint, realize_direction
from app.models.phi import PhiSpec, q_from_phi
from app.schemas.reports import ClassificationVerdict, RiemannianTestResult, SigmaTResult, TConditionResult
from app.services.tensor_engine import PointState, sigma_contract

logger = logging.getLogger(__name__)

DEFAULT_GRID_SIZE = 33


def chebyshev_nodes(lo: float, hi: float, n: int) -> np.ndarray:
    k = np.arange(n)
    nodes = (lo + hi) / 2 + (hi - lo) / 2 * np.cos((2 * k + 1) * np.pi / (2 * n))
    return np.sort(nodes)


def default_grid(spec: PhiSpec, b_sq: float, n: int = DEFAULT_GRID_SIZE) -> list[float]:
    """Chebyshev s-grid that stays 5% away from 0 and from |s| = b."""
    b = math.sqrt(b_sq)
    dom = spec.domain()
    if dom.positive:
        nodes = chebyshev_nodes(0.05 * b, 0.95 * b, n)
    else:
        nodes = np.concatenate(
            [chebyshev_nodes(-0.95 * b, -0.05 * b, math.ceil(n / 2)), chebyshev_nodes(0.05 * b, 0.95 * b, n // 2)]
        )
    grid = [float(s) for s in nodes if dom.contains(float(s))]
    if not grid:
        raise EmptyGrid(f"no grid point of (0.05b, 0.95b) lies in the {spec.family.value} domain")
    return grid


def _require_dim(mp: MetricPoint) -> None:
    if mp.dim < 3:
        raise DimensionTooSmall(f"the characterization needs n >= 3, fixture has n = {mp.dim}")


def grid_states(mp: MetricPoint, spec: PhiSpec, grid: Sequence[float], scale: float = 1.0) -> list[PointState]:
    if len(grid) == 0:
        raise EmptyGrid("classification grid is empty")
    dom = spec.domain()
    states = []
    for s in grid:
        if not dom.contains(s):
            raise OutOfDomain(f"grid sample s = {s:.6g} lies outside the {spec.family.value} domain")
        states.append(PointState(mp, scale * realize_direction(mp, s), spec))
    return states


def _max_abs(values) -> float:
    return float(np.max(np.abs(values))) if len(values) else 0.0


def _riemannian(states: list[PointState], tol: float) -> RiemannianTestResult:
    s = np.array([st.geo.s for st in states])
    rho1 = _max_abs([st.rho.rho1 for st in states])
    rho2 = _max_abs([st.rho.rho2 / max(1.0, abs(st.geo.s)) for st in states])
    cartan = max(float(np.max(np.abs(st.cartan_dense))) for st in states)
    flags = {rho1 <= 10 * tol, rho2 <= 10 * tol, cartan <= 10 * tol}
    phi_sq = np.array([st.phi**2 for st in states])
    design = np.column_stack([s * s, np.ones_like(s)])
    (k1, k2), *_ = np.linalg.lstsq(design, phi_sq, rcond=None)
    fit_residual = _max_abs(design @ np.array([k1, k2]) - phi_sq)
    return RiemannianTestResult(
        passed=rho1 <= tol,
        rho1=rho1,
        rho2=rho2,
        cartan=cartan,
        consistent=len(flags) == 1,
        k1=float(k1),
        k2=float(k2),
        fit_residual=fit_residual,
    )


def _berwald_fit(mp: MetricPoint, spec: PhiSpec, grid: Sequence[float]) -> tuple[float, float]:
    """Least-squares c in ``1 + sQ = c (b^2 - s^2)``; residual measured on Q."""
    s = np.asarray(grid, dtype=float)
    q = np.array([q_from_phi(spec, x, 0).value for x in s])
    m_sq = mp.b_sq - s * s
    c = float(np.dot(1.0 + s * q, m_sq) / np.dot(m_sq, m_sq))
    fitted = (c * mp.b_sq - 1.0) / s - c * s
    return c, _max_abs(q - fitted)


def _t_condition(mp: MetricPoint, spec: PhiSpec, states: list[PointState], tol: float) -> TConditionResult:
    coeffs = [st.coefficients for st in states]
    Phi = _max_abs([c.Phi for c in coeffs])
    Psi = _max_abs([c.Psi for c in coeffs])
    Omega = _max_abs([c.Omega for c in coeffs])
    result = TConditionResult(passed=Phi <= tol, Phi=Phi, Psi=Psi, Omega=Omega)
    if result.passed:
        result.converse_ok = Psi <= 100 * tol and Omega <= 100 * tol
        if not result.converse_ok:
            logger.warning("Phi vanishes but Psi=%.3g Omega=%.3g do not", Psi, Omega)
        grid = [st.geo.s for st in states]
        if all(abs(s) > settings.GUARD for s in grid):
            c, residual = _berwald_fit(mp, spec, grid)
            result.berwald_c = c
            result.fit_residual = residual
            result.fit_ok = residual <= settings.FIT_TOL
    return result


def _sigma_t_condition(mp: MetricPoint, states: list[PointState], tol: float) -> SigmaTResult:
    n = mp.dim
    first, second, traced_phi, traced_psi = [], [], [], []
    contraction, condition_c = 0.0, 0.0
    for st in states:
        if abs(st.geo.s) < settings.GUARD:
            raise SDividesZero(f"guarded denominator s = {st.geo.s:.3g}; the sigmaT test divides by s")
        c, m2 = st.coefficients, st.geo.m_sq
        first.append(c.Phi + m2 * c.Psi)
        second.append(3 * c.Psi + m2 * c.Omega)
        traced_phi.append((n + 1) * c.Phi + m2 * c.Psi)
        traced_psi.append((n + 3) * c.Psi + m2 * c.Omega)
        sc = sigma_contract(mp.b, mp, st.geo.y, st.spec, state=st)
        contraction = max(contraction, sc.max_abs)
        condition_c = max(condition_c, sc.condition_c)
    a, b = _max_abs(first), _max_abs(second)
    return SigmaTResult(
        passed=a <= tol and b <= tol,
        Phi_plus_m2Psi=a,
        threePsi_plus_m2Omega=b,
        traced_Phi=_max_abs(traced_phi),
        traced_Psi=_max_abs(traced_psi),
        sigma=[float(v) for v in mp.b],
        sigma_contraction=contraction,
        condition_c=condition_c,
    )


def riemannian_test(mp: MetricPoint, spec: PhiSpec, grid: Sequence[float], tol: float | None = None) -> RiemannianTestResult:
    _require_dim(mp)
    return _riemannian(grid_states(mp, spec, grid), tol or settings.TOL)


def t_condition_test(mp: MetricPoint, spec: PhiSpec, grid: Sequence[float], tol: float | None = None) -> TConditionResult:
    _require_dim(mp)
    return _t_condition(mp, spec, grid_states(mp, spec, grid), tol or settings.TOL)


def sigma_t_condition_test(
    mp: MetricPoint, spec: PhiSpec, grid: Sequence[float], tol: float | None = None
) -> SigmaTResult:
    _require_dim(mp)
    return _sigma_t_condition(mp, grid_states(mp, spec, grid), tol or settings.TOL)


def classify(
    mp: MetricPoint,
    spec: PhiSpec,
    grid: Sequence[float] | None = None,
    tol: float | None = None,
    *,
    scale: float = 1.0,
    strict: bool = True,
) -> ClassificationVerdict:
    """Run the three tests on one grid; the most specific passing kind wins.

    ``scale`` multiplies every realized direction (verdicts must not depend
    on it). With ``strict=False`` a two-dimensional fixture is evaluated and
    flagged through ``dim_ok`` instead of raising.
    """

    tol = tol or settings.TOL
    dim_ok = mp.dim >= 3
    if strict and not dim_ok:
        _require_dim(mp)
    if grid is None:
        grid = default_grid(spec, mp.b_sq)
    states = grid_states(mp, spec, grid, scale)
    riem = _riemannian(states, tol)
    tcond = _t_condition(mp, spec, states, tol)
    sigma = _sigma_t_condition(mp, states, tol)
    if riem.passed:
        kind = "Riemannian"
    elif tcond.passed:
        kind = "TCondition"
    elif sigma.passed:
        kind = "SigmaTCondition"
    else:
        kind = "General"
    residuals = {
        "rho1": riem.rho1,
        "rho2": riem.rho2,
        "cartan": riem.cartan,
        "Phi": tcond.Phi,
        "Psi": tcond.Psi,
        "Omega": tcond.Omega,
        "Phi_plus_m2Psi": sigma.Phi_plus_m2Psi,
        "threePsi_plus_m2Omega": sigma.threePsi_plus_m2Omega,
        "sigma_contraction": sigma.sigma_contraction,
        "condition_c": sigma.condition_c,
    }
    logger.info("classified %s on %d samples as %s", spec.label, len(states), kind)
    return ClassificationVerdict(
        kind=kind,
        residuals=residuals,
        grid=[float(s) for s in grid],
        dim_ok=dim_ok,
        tol=tol,
        riemannian=riem,
        t_condition=tcond,
        sigma_t_condition=sigma,
    )
