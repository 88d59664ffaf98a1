"""Report models returned by the services, the CLI and the HTTP routers."""

from __future__ import annotations

from typing import Any, Literal, Optional

from pydantic import BaseModel, Field


class TensorOut(BaseModel):
    dim: int
    rank: int
    index_order: list[list[int]]
    components: list[float]
    asymmetry: float = 0.0


class GeometryOut(BaseModel):
    y: list[float]
    alpha: float
    beta: float
    s: float
    m_sq: float
    F: float
    residuals: dict[str, float] = Field(default_factory=dict)


class TCoefficientsOut(BaseModel):
    Phi: float
    Psi: float
    Omega: float
    K1: float
    K2: float
    mu0: float
    mu1: float
    mu2: float
    conditioning: float
    K1_alternate: float
    K2_alternate: float
    helper_identity_residual: float


class TensorReport(BaseModel):
    phi: dict[str, Any]
    geometry: GeometryOut
    rho: dict[str, float]
    coefficients: Optional[TCoefficientsOut] = None
    mu_system_residuals: list[float] = Field(default_factory=list)
    tensors: dict[str, TensorOut]
    raised_paths_max_deviation: Optional[float] = None
    unavailable: dict[str, str] = Field(default_factory=dict)


class RegularitySample(BaseModel):
    s: float
    phi: float
    phi_positive: bool
    convexity_min: float
    convexity_ok: bool
    denominator: float
    denominator_ok: bool


class RegularityReport(BaseModel):
    family: str
    b_sq: float
    b0: float
    classification: Literal["regular", "positively-almost-regular", "irregular"]
    samples: list[RegularitySample]


class ComparisonReport(BaseModel):
    max_abs: float
    max_rel: float = Field(description="max_abs / max(1, max|oracle|)")
    argmax: list[int]
    oracle_scale: float
    terms: dict[str, float] = Field(default_factory=dict)


class VerificationSample(BaseModel):
    s: float
    y: list[float]
    comparisons: dict[str, ComparisonReport]


class VerificationReport(BaseModel):
    phi: dict[str, Any]
    tol: float
    samples: list[VerificationSample]
    worst: dict[str, float]
    passed: bool


class RiemannianTestResult(BaseModel):
    passed: bool
    rho1: float
    rho2: float
    cartan: float
    consistent: bool
    k1: float
    k2: float
    fit_residual: float


class TConditionResult(BaseModel):
    passed: bool
    Phi: float
    Psi: float
    Omega: float
    converse_ok: Optional[bool] = None
    berwald_c: Optional[float] = None
    fit_residual: Optional[float] = None
    fit_ok: Optional[bool] = None


class SigmaTResult(BaseModel):
    passed: bool
    Phi_plus_m2Psi: float
    threePsi_plus_m2Omega: float
    traced_Phi: float
    traced_Psi: float
    sigma: list[float]
    sigma_contraction: float
    condition_c: float


class ClassificationVerdict(BaseModel):
    kind: Literal["Riemannian", "TCondition", "SigmaTCondition", "General"]
    residuals: dict[str, float]
    grid: list[float]
    dim_ok: bool
    tol: float
    riemannian: RiemannianTestResult
    t_condition: TConditionResult
    sigma_t_condition: SigmaTResult


class OdeResidualReport(BaseModel):
    q: dict[str, Any]
    b_sq: float
    grid: list[float]
    residual_trivial: list[Optional[float]]
    residual_landsberg: list[Optional[float]]
    max_abs: dict[str, Optional[float]]


class PhiCheckReport(BaseModel):
    name: str
    params: dict[str, float]
    grid: list[float]
    phi_closed: list[Optional[float]] = Field(default_factory=list)
    phi_quadrature: list[Optional[float]] = Field(default_factory=list)
    ratio: list[Optional[float]] = Field(default_factory=list)
    deviations: dict[str, float]
    passed: bool


class KropinaAuditRow(BaseModel):
    s: float
    alpha: float
    recomputed: dict[str, float]
    printed: dict[str, float]
    oracle_max_rel: float


class KropinaAudit(BaseModel):
    b_sq: float
    rows: list[KropinaAuditRow]
    recomputed_vs_printed: dict[str, float]
    recomputed_vs_oracle: float
    passed: bool


class CriterionResult(BaseModel):
    number: int
    name: str
    passed: bool
    details: dict[str, Any] = Field(default_factory=dict)


class SuiteReport(BaseModel):
    seed: int
    tol: float
    criteria: list[CriterionResult]
    passed: bool
