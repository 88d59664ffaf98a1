"""The phi catalogue: families, Taylor jets, the Q transform and regularity.

``F = alpha * phi(beta / alpha)``. Every family emits exact derivatives of phi
up to fourth order through ``ScalarJet`` arithmetic. Families defined by their
``Q = phi' / (phi - s phi')`` take phi itself from the exp-integral and the
derivatives from the log-derivative ``L = Q / (1 + s Q)``.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Any, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field, model_validator
from scipy.integrate import IntegrationWarning, quad

from app.core.config import settings
from app.core.errors import (
    EmptyGrid,
    OrderTooHigh,
    OutOfDomain,
    PoleOnPath,
    QuadratureFailure,
    UnsupportedParameterRange,
    guard,
)
from app.models.jet import ScalarJet
from app.schemas.reports import RegularityReport, RegularitySample

logger = logging.getLogger(__name__)

MAX_ORDER = 4
POLE_SAMPLES = 65


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def contains(self, s: float) -> bool:
        return self.lo < s < self.hi

    @property
    def positive(self) -> bool:
        return self.lo >= 0.0

    def intersect(self, other: "Interval") -> "Interval":
        return Interval(max(self.lo, other.lo), min(self.hi, other.hi))


REAL_LINE = Interval(-math.inf, math.inf)


class QKind(str, Enum):
    linear = "linear"
    berwald = "berwald"
    polynomial = "polynomial"
    from_phi = "from_phi"


class PhiFamily(str, Enum):
    riemannian = "riemannian"
    randers = "randers"
    kropina = "kropina"
    shen_berwald = "shen_berwald"
    shen_landsberg = "shen_landsberg"
    general_q = "general_q"
    series = "series"
    sqrt_linear = "sqrt_linear"


_REQUIRED: dict[PhiFamily, tuple[str, ...]] = {
    PhiFamily.riemannian: ("k1", "k2"),
    PhiFamily.randers: (),
    PhiFamily.kropina: (),
    PhiFamily.shen_berwald: ("c", "b_sq"),
    PhiFamily.shen_landsberg: ("c1", "c2", "b_sq"),
    PhiFamily.general_q: ("q",),
    PhiFamily.series: ("coefficients",),
    PhiFamily.sqrt_linear: ("c1", "c2", "b_sq"),
}

class PhiSpec(BaseModel):
    family: PhiFamily
    params: dict[str, Any] = Field(default_factory=dict)
    c3: float = 1.0

    @model_validator(mode="after")
    def _check_params(self) -> "PhiSpec":
        missing = [k for k in _REQUIRED[self.family] if k not in self.params]
        if missing:
            raise ValueError(f"{self.family.value} needs params {', '.join(missing)}")
        for key, value in list(self.params.items()):
            if key == "q":
                if not isinstance(value, QSpec):
                    self.params["q"] = QSpec.model_validate(value)
            elif key == "coefficients":
                self.params[key] = [float(v) for v in value]
            else:
                self.params[key] = float(value)
        if self.c3 <= 0:
            raise ValueError("c3 must be positive")
        if self.family is PhiFamily.riemannian and self.params["k2"] <= 0:
            raise ValueError("riemannian family needs k2 > 0")
        if "b_sq" in self.params and self.params["b_sq"] <= 0:
            raise ValueError("b_sq must be positive")
        if self.family is PhiFamily.shen_berwald:
            cb2 = self.params["c"] * self.params["b_sq"]
            if cb2 <= 1.0:
                raise UnsupportedParameterRange(f"shen_berwald needs c b^2 > 1, got {cb2:.6g}")
        return self

    # ---- presets ------------------------------------------------------

    @classmethod
    def riemannian(cls, k1: float, k2: float, c3: float = 1.0) -> "PhiSpec":
        return cls(family=PhiFamily.riemannian, params={"k1": k1, "k2": k2}, c3=c3)

    @classmethod
    def randers(cls, c3: float = 1.0) -> "PhiSpec":
        return cls(family=PhiFamily.randers, c3=c3)

    @classmethod
    def kropina(cls, c3: float = 1.0) -> "PhiSpec":
        return cls(family=PhiFamily.kropina, c3=c3)

    @classmethod
    def shen_berwald(cls, c: float, b_sq: float, c3: float = 1.0) -> "PhiSpec":
        return cls(family=PhiFamily.shen_berwald, params={"c": c, "b_sq": b_sq}, c3=c3)

    @classmethod
    def shen_landsberg(
        cls, c1: float, c2: float, b_sq: float, c3: float = 1.0, s_ref: float | None = None
    ) -> "PhiSpec":
        """Q = c1 sqrt(b^2 - s^2) + c2 s."""
        params = {"c1": c1, "c2": c2, "b_sq": b_sq}
        if s_ref is not None:
            params["s_ref"] = s_ref
        return cls(family=PhiFamily.shen_landsberg, params=params, c3=c3)

    @classmethod
    def shen_landsberg_normalized(cls, k: float, c: float, b0: float, c3: float = 1.0) -> "PhiSpec":
        """Q = k sqrt(1 - (s/b0)^2) + c s for a one-form of constant length b0."""
        return cls.shen_landsberg(c1=k / b0, c2=c, b_sq=b0 * b0, c3=c3)

    @classmethod
    def asanov(cls, k: float = 1.0, c3: float = 1.0) -> "PhiSpec":
        return cls.shen_landsberg_normalized(k=k, c=0.0, b0=1.0, c3=c3)

    @classmethod
    def general_q(cls, q: "QSpec", s_ref: float | None = None, c3: float = 1.0) -> "PhiSpec":
        params: dict[str, Any] = {"q": q}
        if s_ref is not None:
            params["s_ref"] = s_ref
        return cls(family=PhiFamily.general_q, params=params, c3=c3)

    @classmethod
    def series(cls, coefficients: Sequence[float], lo: float = -1.0, hi: float = 1.0, c3: float = 1.0) -> "PhiSpec":
        return cls(
            family=PhiFamily.series, params={"coefficients": list(coefficients), "lo": lo, "hi": hi}, c3=c3
        )

    @classmethod
    def sqrt_linear(cls, c1: float, c2: float, b_sq: float, c3: float = 1.0) -> "PhiSpec":
        """phi = c1 s + c2 sqrt(b^2 - s^2)."""
        return cls(family=PhiFamily.sqrt_linear, params={"c1": c1, "c2": c2, "b_sq": b_sq}, c3=c3)

    def with_c3(self, c3: float) -> "PhiSpec":
        return PhiSpec(family=self.family, params=dict(self.params), c3=c3)

    # ---- derived data -------------------------------------------------

    @property
    def label(self) -> str:
        shown = {k: v for k, v in self.params.items() if k not in ("q", "coefficients")}
        inner = ", ".join(f"{k}={v:g}" for k, v in shown.items())
        return f"{self.family.value}({inner})"

    def q_spec(self) -> Optional["QSpec"]:
        if self.family is PhiFamily.shen_landsberg:
            p = self.params
            return QSpec.linear(c1=p["c2"], c2=p["c1"], b_sq=p["b_sq"])
        if self.family is PhiFamily.general_q:
            return self.params["q"]
        return None

    def domain(self) -> Interval:
        p = self.params
        match self.family:
            case PhiFamily.riemannian:
                if p["k1"] >= 0:
                    return REAL_LINE
                bound = math.sqrt(p["k2"] / -p["k1"])
                return Interval(-bound, bound)
            case PhiFamily.randers:
                return Interval(-1.0, math.inf)
            case PhiFamily.kropina:
                return Interval(0.0, math.inf)
            case PhiFamily.shen_berwald:
                return Interval(0.0, math.sqrt(p["b_sq"]))
            case PhiFamily.shen_landsberg | PhiFamily.sqrt_linear:
                b = math.sqrt(p["b_sq"])
                return Interval(-b, b)
            case PhiFamily.general_q:
                out = p["q"].domain()
                if "lo" in p or "hi" in p:
                    out = out.intersect(Interval(p.get("lo", -math.inf), p.get("hi", math.inf)))
                return out
            case PhiFamily.series:
                return Interval(p.get("lo", -1.0), p.get("hi", 1.0))
        raise AssertionError(self.family)

    def s_ref(self) -> float:
        if "s_ref" in self.params:
            return self.params["s_ref"]
        q = self.q_spec()
        return q.default_s_ref() if q is not None else 0.0


class QSpec(BaseModel):
    kind: QKind
    params: dict[str, float] = Field(default_factory=dict)
    coefficients: list[float] = Field(default_factory=list)
    phi: Optional[PhiSpec] = None

    @model_validator(mode="after")
    def _check(self) -> "QSpec":
        needed = {
            QKind.linear: ("c1", "c2", "b_sq"),
            QKind.berwald: ("c", "b_sq"),
            QKind.polynomial: (),
            QKind.from_phi: (),
        }[self.kind]
        missing = [k for k in needed if k not in self.params]
        if missing:
            raise ValueError(f"Q kind {self.kind.value} needs params {', '.join(missing)}")
        if self.kind is QKind.polynomial and not self.coefficients:
            raise ValueError("polynomial Q needs coefficients")
        if self.kind is QKind.from_phi and self.phi is None:
            raise ValueError("from_phi Q needs a phi spec")
        return self

    @classmethod
    def linear(cls, c1: float, c2: float, b_sq: float) -> "QSpec":
        """Q = c1 s + c2 sqrt(b^2 - s^2)."""
        return cls(kind=QKind.linear, params={"c1": c1, "c2": c2, "b_sq": b_sq})

    @classmethod
    def berwald(cls, c: float, b_sq: float) -> "QSpec":
        """Q = (c b^2 - 1)/s - c s."""
        return cls(kind=QKind.berwald, params={"c": c, "b_sq": b_sq})

    @classmethod
    def polynomial(cls, coefficients: Sequence[float]) -> "QSpec":
        return cls(kind=QKind.polynomial, coefficients=list(coefficients))

    @classmethod
    def from_phi(cls, phi: PhiSpec) -> "QSpec":
        return cls(kind=QKind.from_phi, phi=phi)

    def domain(self) -> Interval:
        p = self.params
        match self.kind:
            case QKind.linear:
                if p["c2"] == 0.0:
                    return REAL_LINE
                b = math.sqrt(p["b_sq"])
                return Interval(-b, b)
            case QKind.berwald:
                return Interval(0.0, math.sqrt(p["b_sq"]))
            case QKind.polynomial:
                return REAL_LINE
            case QKind.from_phi:
                return self.phi.domain()
        raise AssertionError(self.kind)

    def default_s_ref(self) -> float:
        if "b_sq" in self.params:
            return math.sqrt(self.params["b_sq"]) / 2
        if self.kind is QKind.from_phi:
            dom = self.phi.domain()
            if dom.contains(0.0):
                return 0.0
            return math.sqrt(self.phi.params["b_sq"]) / 2 if "b_sq" in self.phi.params else 0.5
        return 0.0

    def jet(self, s: float, order: int) -> ScalarJet:
        x = ScalarJet.variable(s, order)
        p = self.params
        match self.kind:
            case QKind.linear:
                out = p["c1"] * x
                if p["c2"] != 0.0:
                    out = out + p["c2"] * (p["b_sq"] - x * x).sqrt()
                return out
            case QKind.berwald:
                cb2 = p["c"] * p["b_sq"]
                return (cb2 - 1.0) / x - p["c"] * x
            case QKind.polynomial:
                out = ScalarJet.constant(self.coefficients[-1], order)
                for coeff in reversed(self.coefficients[:-1]):
                    out = out * x + coeff
                return out
            case QKind.from_phi:
                return q_from_phi(self.phi, s, order)
        raise AssertionError(self.kind)

    def value(self, t: float) -> float:
        p = self.params
        match self.kind:
            case QKind.linear:
                out = p["c1"] * t
                if p["c2"] != 0.0:
                    out += p["c2"] * math.sqrt(p["b_sq"] - t * t)
                return out
            case QKind.berwald:
                return (p["c"] * p["b_sq"] - 1.0) / t - p["c"] * t
            case QKind.polynomial:
                return float(np.polynomial.polynomial.polyval(t, self.coefficients))
            case QKind.from_phi:
                return q_from_phi(self.phi, t, 0).value
        raise AssertionError(self.kind)



def phi_from_q(q: QSpec, s: float, s_ref: float | None = None, c3: float = 1.0) -> float:
    """``c3 * exp(int_{s_ref}^{s} Q / (1 + t Q) dt)`` by adaptive quadrature."""

    if s_ref is None:
        s_ref = q.default_s_ref()
    dom = q.domain()
    for point in (s, s_ref):
        if not dom.contains(point):
            raise OutOfDomain(f"s = {point:.6g} lies outside the Q domain ({dom.lo:.6g}, {dom.hi:.6g})")
    if s == s_ref:
        return c3

    ts = np.linspace(s_ref, s, POLE_SAMPLES)
    w = np.array([1.0 + t * q.value(t) for t in ts])
    if np.any(np.abs(w) < settings.GUARD) or np.any(np.sign(w) != np.sign(w[0])):
        raise PoleOnPath(f"1 + tQ(t) vanishes between s_ref = {s_ref:.6g} and s = {s:.6g}")

    def integrand(t: float) -> float:
        qt = q.value(t)
        return qt / (1.0 + t * qt)

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", IntegrationWarning)
        value, abserr = quad(integrand, s_ref, s, epsabs=settings.QUAD_TOL, epsrel=settings.QUAD_TOL, limit=100)
    if caught:
        if abserr > 1e3 * settings.QUAD_TOL:
            raise QuadratureFailure(f"quadrature from {s_ref:.6g} to {s:.6g} failed: {caught[0].message}")
        logger.debug("quadrature warning tolerated (abserr=%.2e): %s", abserr, caught[0].message)
    return c3 * math.exp(value)


def _jet_from_q(q: QSpec, s: float, order: int, s_ref: float) -> ScalarJet:
    phi0 = phi_from_q(q, s, s_ref, 1.0)
    if order == 0:
        return ScalarJet.constant(phi0, 0)
    qj = q.jet(s, order - 1)
    x = ScalarJet.variable(s, order - 1)
    w = 1.0 + x * qj
    guard("1 + sQ", w.value, error=PoleOnPath)
    ld = (qj / w).derivatives
    d = [phi0]
    for k in range(order):
        d.append(sum(math.comb(k, j) * ld[j] * d[k - j] for j in range(k + 1)))
    return ScalarJet.from_derivatives(d)


def phi_jet(spec: PhiSpec, s: float, order: int = MAX_ORDER) -> ScalarJet:
    if order > MAX_ORDER:
        raise OrderTooHigh(f"phi jets are available up to order {MAX_ORDER}, asked for {order}")
    dom = spec.domain()
    if not dom.contains(s):
        raise OutOfDomain(f"s = {s:.6g} lies outside the {spec.family.value} domain ({dom.lo:.6g}, {dom.hi:.6g})")

    p = spec.params
    x = ScalarJet.variable(s, order)
    match spec.family:
        case PhiFamily.riemannian:
            jet = (p["k1"] * x * x + p["k2"]).sqrt()
        case PhiFamily.randers:
            jet = 1.0 + x
        case PhiFamily.kropina:
            jet = 1.0 / x
        case PhiFamily.shen_berwald:
            c, b_sq = p["c"], p["b_sq"]
            cb2 = c * b_sq
            jet = x ** ((cb2 - 1.0) / cb2) * (cb2 - c * x * x) ** (1.0 / (2.0 * cb2))
        case PhiFamily.shen_landsberg | PhiFamily.general_q:
            jet = _jet_from_q(spec.q_spec(), s, order, spec.s_ref())
        case PhiFamily.series:
            coeffs = p["coefficients"]
            jet = ScalarJet.constant(coeffs[-1], order)
            for coeff in reversed(coeffs[:-1]):
                jet = jet * x + coeff
        case PhiFamily.sqrt_linear:
            jet = p["c1"] * x + p["c2"] * (p["b_sq"] - x * x).sqrt()
        case _:
            raise AssertionError(spec.family)
    return jet * spec.c3


def q_from_phi(spec: PhiSpec, s: float, order: int = 2) -> ScalarJet:
    """Jet of ``Q = phi' / (phi - s phi')`` at ``s``."""

    if order > MAX_ORDER - 1:
        raise OrderTooHigh(f"Q jets are available up to order {MAX_ORDER - 1}")
    phi = phi_jet(spec, s, order + 1)
    dphi = phi.derivative()
    den = phi.truncate(order) - ScalarJet.variable(s, order) * dphi
    guard("phi - s phi'", den.value, settings.Q_GUARD)
    return dphi / den


def regularity_check(
    spec: PhiSpec, b_sq: float, b0: float, grid: Sequence[float], t_samples: int = 8
) -> RegularityReport:
    """Sample the positivity conditions of F on a grid of s.

    At each s: phi > 0, ``phi - s phi' + (t^2 - s^2) phi'' > 0`` for t sampled
    on ``(|s|, b0)``, and ``rho + phi phi'' m^2 > 0`` with ``m^2 = b^2 - s^2``.
    """

    if len(grid) == 0:
        raise EmptyGrid("regularity check needs at least one sample")
    dom = spec.domain()
    samples = []
    for s in grid:
        if not dom.contains(s):
            raise OutOfDomain(f"grid sample s = {s:.6g} lies outside the {spec.family.value} domain")
        d = phi_jet(spec, s, 2).derivatives
        phi, dphi, ddphi = (float(v) for v in d)
        ts = abs(s) + (b0 - abs(s)) * np.arange(1, t_samples + 1) / (t_samples + 1)
        convexity = phi - s * dphi + (ts * ts - s * s) * ddphi
        rho = phi * phi - s * phi * dphi
        denominator = rho + phi * ddphi * (b_sq - s * s)
        samples.append(
            RegularitySample(
                s=s,
                phi=phi,
                phi_positive=phi > 0,
                convexity_min=float(np.min(convexity)),
                convexity_ok=bool(np.all(convexity > 0)),
                denominator=denominator,
                denominator_ok=denominator > settings.GUARD,
            )
        )
    ok = all(x.phi_positive and x.convexity_ok and x.denominator_ok for x in samples)
    if not ok:
        classification = "irregular"
    elif dom.positive:
        classification = "positively-almost-regular"
    else:
        classification = "regular"
    logger.info("regularity of %s on %d samples: %s", spec.label, len(samples), classification)
    return RegularityReport(family=spec.family.value, b_sq=b_sq, b0=b0, classification=classification, samples=samples)
