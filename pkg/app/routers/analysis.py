from __future__ import annotations

import logging

from fastapi import APIRouter, Depends, Query

from app.deps import resolve_fixture, resolve_tol
from app.schemas.reports import ClassificationVerdict, OdeResidualReport, PhiCheckReport, TensorReport, VerificationReport
from app.schemas.requests import ClassifyRequest, OdeCheckRequest, TensorRequest, VerifyRequest
from app.services.classifier import classify, default_grid
from app.services.ode_lab import run_ode_check
from app.services.snapshot import tensor_report
from app.services.verification import VERIFY_TOL, verify_family

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/api", tags=["analysis"])


@router.post("/tensors", response_model=TensorReport)
def tensors(body: TensorRequest):
    logger.info("POST /api/tensors phi=%s", body.phi.label)
    return tensor_report(resolve_fixture(body.fixture), body.phi, y=body.y, s=body.s)


@router.post("/classify", response_model=ClassificationVerdict)
def classify_metric(body: ClassifyRequest, tol: float = Depends(resolve_tol)):
    mp = resolve_fixture(body.fixture)
    grid = body.grid or default_grid(body.phi, mp.b_sq, body.grid_size)
    verdict = classify(mp, body.phi, grid, tol)
    logger.info("POST /api/classify phi=%s -> %s", body.phi.label, verdict.kind)
    return verdict


@router.post("/verify", response_model=VerificationReport)
def verify(body: VerifyRequest, tol: float | None = Query(default=None, gt=0)):
    mp = resolve_fixture(body.fixture)
    report = verify_family(mp, body.phi, n=body.samples, seed=body.seed, tol=tol or VERIFY_TOL)
    if not report.passed:
        logger.warning("verification of %s failed (worst %s)", body.phi.label, report.worst)
    return report


@router.post("/ode-check", response_model=OdeResidualReport | PhiCheckReport)
def ode_check(body: OdeCheckRequest):
    logger.info("POST /api/ode-check check=%s", body.check.value)
    return run_ode_check(body.check, body.params, q=body.q, grid=body.grid, grid_size=body.grid_size)
