"""Acceptance battery over the bundled fixtures."""

from __future__ import annotations

import logging
import time
from typing import Any, Callable

import numpy as np

from app.core.config import settings
from app.core.errors import FinslerError
from app.fixtures import load_fixture
from app.models.phi import PhiSpec, QSpec
from app.schemas.reports import CriterionResult, SuiteReport
from app.services import ode_lab
from app.services.audit import kropina_audit
from app.services.classifier import chebyshev_nodes, classify, default_grid, grid_states
from app.services.tensor_engine import PointState
from app.services.verification import oracle_samples, verify_family

logger = logging.getLogger(__name__)

STRICT = 1e-9
BERWALD_C = (1.5, 2.0, 3.0)
LANDSBERG_PAIRS = ((1.0, 0.5), (1.0, 0.0), (-0.7, 0.3), (0.5, -1.0))
LINEAR_PAIRS = ((1.0, 0.0), (0.0, 1.0), (1.0, 0.5), (-0.7, 0.3))
LANDSBERG_B_SQ = 0.36


def oracle_families() -> list[tuple[str, PhiSpec]]:
    return [
        ("standard", PhiSpec.riemannian(1.0, 1.0)),
        ("standard", PhiSpec.randers()),
        ("kropina", PhiSpec.kropina()),
        ("berwald", PhiSpec.shen_berwald(2.0, 1.0)),
        ("landsberg", PhiSpec.shen_landsberg(1.0, 0.5, LANDSBERG_B_SQ)),
    ]


def randers_corollary(seed: int, tol: float) -> tuple[bool, dict[str, Any]]:
    mp = load_fixture("standard")
    spec = PhiSpec.randers()
    worst_phi = worst_rest = 0.0
    for st in grid_states(mp, spec, default_grid(spec, mp.b_sq)):
        c, s, alpha = st.coefficients, st.geo.s, st.geo.alpha
        expected = -(mp.b_sq + s * s + 2 * s) / (4 * alpha)
        worst_phi = max(worst_phi, abs(c.Phi - expected) / max(1.0, abs(expected)))
        worst_rest = max(worst_rest, abs(c.Psi), abs(c.Omega))
    return worst_phi <= 1e-12 and worst_rest <= 1e-12, {"Phi_rel": worst_phi, "Psi_Omega": worst_rest}


def oracle_equivalence(seed: int, tol: float) -> tuple[bool, dict[str, Any]]:
    details = {}
    ok = True
    for fixture, spec in oracle_families():
        report = verify_family(load_fixture(fixture), spec, seed=seed, tol=STRICT)
        worst = {k: report.worst[k] for k in ("metric", "cartan", "t")}
        details[spec.label] = worst
        ok = ok and len(report.samples) == 20 and all(v <= STRICT for v in worst.values())
    return ok, details


def t_condition_class(seed: int, tol: float) -> tuple[bool, dict[str, Any]]:
    mp = load_fixture("berwald")
    details = {}
    ok = True
    for c in BERWALD_C:
        verdict = classify(mp, PhiSpec.shen_berwald(c, mp.b_sq), tol=tol)
        worst = max(verdict.t_condition.Phi, verdict.t_condition.Psi, verdict.t_condition.Omega)
        details[f"c={c:g}"] = {"kind": verdict.kind, "max_T_coefficient": worst, "fitted_c": verdict.t_condition.berwald_c}
        ok = ok and worst <= STRICT and verdict.kind == "TCondition"
    return ok, details


def sigma_t_class(seed: int, tol: float) -> tuple[bool, dict[str, Any]]:
    mp = load_fixture("landsberg")
    details = {}
    ok = True
    for c1, c2 in LANDSBERG_PAIRS:
        sig = classify(mp, PhiSpec.shen_landsberg(c1, c2, mp.b_sq), tol=tol).sigma_t_condition
        worst = max(sig.Phi_plus_m2Psi, sig.threePsi_plus_m2Omega, sig.sigma_contraction)
        details[f"c1={c1:g},c2={c2:g}"] = sig.model_dump(include={"Phi_plus_m2Psi", "threePsi_plus_m2Omega", "sigma_contraction"})
        ok = ok and worst <= STRICT
    return ok, details


def ode_residuals(seed: int, tol: float) -> tuple[bool, dict[str, Any]]:
    berwald_grid = [float(s) for s in chebyshev_nodes(0.05, 0.95, 33)]
    b = LANDSBERG_B_SQ**0.5
    linear_grid = [float(s) for s in chebyshev_nodes(-0.95 * b, 0.95 * b, 33)]
    trivial = max(
        abs(ode_lab.residual_trivial_ode(QSpec.berwald(c, 1.0), s, 1.0)) for c in BERWALD_C for s in berwald_grid
    )
    landsberg = max(
        abs(ode_lab.residual_landsberg_ode(QSpec.linear(c1, c2, LANDSBERG_B_SQ), s, LANDSBERG_B_SQ))
        for c1, c2 in LINEAR_PAIRS
        for s in linear_grid
    )
    exclusion = {
        "berwald_in_landsberg_ode": abs(ode_lab.residual_landsberg_ode(QSpec.berwald(2.0, 1.0), 0.5, 1.0)),
        "linear_in_trivial_ode": abs(ode_lab.residual_trivial_ode(QSpec.linear(1.0, 0.5, LANDSBERG_B_SQ), 0.3, LANDSBERG_B_SQ)),
        "zero_in_trivial_ode": abs(ode_lab.residual_trivial_ode(QSpec.linear(0.0, 0.0, 1.0), 0.5, 1.0)),
    }
    ok = trivial <= 1e-10 and landsberg <= 1e-10 and all(v > 1e-3 for v in exclusion.values())
    return ok, {"trivial": trivial, "landsberg": landsberg, **exclusion}


def riemannian_chain(seed: int, tol: float) -> tuple[bool, dict[str, Any]]:
    mp = load_fixture("standard")
    details: dict[str, Any] = {}
    ok = True
    for k1, k2 in ((1.0, 1.0), (2.0, 3.0), (0.0, 1.0)):
        spec = PhiSpec.riemannian(k1, k2)
        worst = 0.0
        for st in grid_states(mp, spec, default_grid(spec, mp.b_sq)):
            worst = max(
                worst,
                abs(st.rho.rho1),
                abs(st.rho.rho2),
                float(np.max(np.abs(st.cartan_dense))),
                float(np.max(np.abs(st.t_dense))),
            )
        details[spec.label] = worst
        ok = ok and worst <= 1e-12
    for fixture, spec in (("standard", PhiSpec.randers()), ("kropina", PhiSpec.kropina())):
        fmp = load_fixture(fixture)
        smallest = min(abs(st.rho.rho1) for st in grid_states(fmp, spec, default_grid(spec, fmp.b_sq)))
        details[f"{spec.label} min |rho1|"] = smallest
        ok = ok and smallest > 0.5
    return ok, details


def property_battery(seed: int, tol: float) -> tuple[bool, dict[str, Any]]:
    worst = {"symmetry": 0.0, "transversality": 0.0, "homogeneity": 0.0, "inverse": 0.0}
    verdicts_stable = True
    for fixture, spec in oracle_families():
        mp = load_fixture(fixture)
        for y in oracle_samples(mp, spec, 5, seed):
            st = PointState(mp, y, spec)
            C, T = st.cartan_lower(), st.t_lower()
            worst["symmetry"] = max(worst["symmetry"], C.asymmetry, T.asymmetry)
            scale_c, scale_t = max(1.0, C.max_abs()), max(1.0, T.max_abs())
            worst["transversality"] = max(
                worst["transversality"],
                float(np.max(np.abs(st.cartan_dense @ y))) / scale_c,
                float(np.max(np.abs(st.t_dense @ y))) / scale_t,
                float(np.max(np.abs(st.geo.h @ y))),
            )
            g = st.metric_lower()
            for lam in (0.5, 2.0):
                other = PointState(mp, lam * y, spec)
                worst["homogeneity"] = max(
                    worst["homogeneity"],
                    float(np.max(np.abs(other.metric_lower() - g))) / max(1.0, float(np.max(np.abs(g)))),
                    float(np.max(np.abs(lam * other.cartan_dense - st.cartan_dense))) / scale_c,
                    float(np.max(np.abs(lam * other.t_dense - st.t_dense))) / scale_t,
                )
            worst["inverse"] = max(worst["inverse"], float(np.max(np.abs(st.metric_upper() @ g - np.eye(mp.dim)))))
        base = classify(mp, spec, tol=tol).kind
        scaled = classify(mp, spec.with_c3(2.5), tol=tol).kind
        verdicts_stable = verdicts_stable and base == scaled
    ok = (
        worst["symmetry"] <= 1e-11
        and worst["transversality"] <= 1e-10
        and worst["homogeneity"] <= 1e-10
        and worst["inverse"] <= 1e-9
        and verdicts_stable
    )
    return ok, {**worst, "c3_verdicts_stable": verdicts_stable}


def kropina_criterion(seed: int, tol: float) -> tuple[bool, dict[str, Any]]:
    audit = kropina_audit(load_fixture("kropina"), tol=STRICT)
    return audit.passed, {"recomputed_vs_oracle": audit.recomputed_vs_oracle, "recomputed_vs_printed": audit.recomputed_vs_printed}


def special_cases(seed: int, tol: float) -> tuple[bool, dict[str, Any]]:
    special = ode_lab.special_phi_report(1.0, LANDSBERG_B_SQ, [float(s) for s in np.linspace(0.06, 0.54, 9)])
    asanov_spec = PhiSpec.asanov(1.0)
    asanov = ode_lab.asanov_check(1.0, default_grid(asanov_spec, asanov_spec.params["b_sq"], 17))
    mp = load_fixture("berwald")
    sig = classify(mp, asanov_spec, tol=tol).sigma_t_condition
    ok = special.passed and asanov.passed and sig.passed and sig.sigma_contraction <= STRICT
    return ok, {
        "arctan_ratio_spread": special.deviations["ratio_spread"],
        "printed_arctan_ratio_spread": special.deviations["printed_ratio_spread"],
        "asanov": asanov.deviations,
        "asanov_sigma_contraction": sig.sigma_contraction,
    }


CRITERIA: list[tuple[str, Callable[[int, float], tuple[bool, dict[str, Any]]]]] = [
    ("Randers T-tensor coefficients", randers_corollary),
    ("closed forms match the multi-dual oracle", oracle_equivalence),
    ("Berwald-type phi satisfies the T-condition", t_condition_class),
    ("Landsberg-type phi satisfies the sigmaT-condition", sigma_t_class),
    ("Q-equation residuals", ode_residuals),
    ("Riemannian equivalence chain", riemannian_chain),
    ("symmetry, transversality, homogeneity, c3 invariance", property_battery),
    ("Kropina coefficients audit", kropina_criterion),
    ("arctan closed form and Asanov preset", special_cases),
]


def run_suite(seed: int = 0, tol: float | None = None) -> SuiteReport:
    tol = tol or settings.TOL
    results = []
    for number, (name, check) in enumerate(CRITERIA, start=1):
        started = time.perf_counter()
        try:
            passed, details = check(seed, tol)
        except FinslerError as exc:
            logger.error("criterion %d (%s) raised %s: %s", number, name, type(exc).__name__, exc)
            passed, details = False, {"error": type(exc).__name__, "message": str(exc)}
        elapsed = time.perf_counter() - started
        logger.info("criterion %d %s: %s (%.2fs)", number, name, "pass" if passed else "FAIL", elapsed)
        results.append(CriterionResult(number=number, name=name, passed=bool(passed), details=details))
    return SuiteReport(seed=seed, tol=tol, criteria=results, passed=all(r.passed for r in results))
