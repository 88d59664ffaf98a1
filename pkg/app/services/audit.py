"""Kropina T-tensor audit against the coefficients printed for it."""

from __future__ import annotations

import logging
from typing import Sequence

from app.models.geometry import MetricPoint, realize_direction
from app.models.phi import PhiSpec
from app.schemas.reports import KropinaAudit, KropinaAuditRow
from app.services.ad_oracle import compare, oracle_t
from app.services.tensor_engine import PointState

logger = logging.getLogger(__name__)

DEFAULT_S = (0.3, 0.4, 0.5, 0.6, 0.7)


def printed_kropina(alpha: float, b_sq: float, s: float) -> dict[str, float]:
    return {
        "Phi": 2.0 / (alpha**2 * b_sq * s**2),
        "Psi": 2.0 / (alpha * b_sq * s**3),
        "Omega": 6.0 / (alpha * b_sq * s**5),
    }


def recomputed_kropina(alpha: float, b_sq: float, s: float) -> dict[str, float]:
    """Coefficients for phi = 1/s worked out from the general T formula."""
    return {
        "Phi": 2.0 / (alpha * b_sq * s),
        "Psi": 2.0 / (alpha * b_sq * s**3),
        "Omega": 6.0 / (alpha * b_sq * s**5),
    }


def kropina_audit(mp: MetricPoint, s_values: Sequence[float] = DEFAULT_S, tol: float = 1e-9) -> KropinaAudit:
    spec = PhiSpec.kropina()
    b = mp.b_norm
    rows = []
    worst_printed = {"Phi": 0.0, "Psi": 0.0, "Omega": 0.0}
    worst_oracle = 0.0
    worst_formula = 0.0
    for s in s_values:
        if not 0 < s < b:
            continue
        # alpha = 2 keeps alpha-powers distinguishable.
        y = 2.0 * realize_direction(mp, s)
        state = PointState(mp, y, spec)
        c = state.coefficients
        engine = {"Phi": c.Phi, "Psi": c.Psi, "Omega": c.Omega}
        alpha = state.geo.alpha
        printed = printed_kropina(alpha, mp.b_sq, state.geo.s)
        formula = recomputed_kropina(alpha, mp.b_sq, state.geo.s)
        report = compare(state.t_lower(), oracle_t(mp, y, spec).tensor)
        worst_oracle = max(worst_oracle, report.max_rel)
        for key in engine:
            worst_printed[key] = max(worst_printed[key], abs(engine[key] - printed[key]) / abs(printed[key]))
            worst_formula = max(worst_formula, abs(engine[key] - formula[key]) / abs(formula[key]))
        rows.append(
            KropinaAuditRow(s=state.geo.s, alpha=alpha, recomputed=engine, printed=printed, oracle_max_rel=report.max_rel)
        )
    if worst_printed["Phi"] > tol:
        logger.warning("printed Kropina Phi differs from the recomputed one (max rel %.3g)", worst_printed["Phi"])
    return KropinaAudit(
        b_sq=mp.b_sq,
        rows=rows,
        recomputed_vs_printed=worst_printed,
        recomputed_vs_oracle=worst_oracle,
        passed=bool(worst_oracle <= tol and worst_formula <= tol and rows),
    )
