"""Closed-form tensors of an (alpha, beta)-metric at one supporting element.

All formulas are expressed through the rho scalars of phi and the auxiliary
tensors ``h_ij``, ``m_i`` and ``n_ij`` of ``app.models.geometry``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from app.core.config import settings
from app.core.errors import DegenerateMetric, InsufficientJetOrder, ParallelDirection, SDividesZero, guard
from app.models.geometry import BaseGeometry, MetricPoint, eval_geometry
from app.models.jet import ScalarJet
from app.models.phi import PhiSpec, phi_jet
from app.models.symmetric import SymmetricTensor

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RhoSet:
    rho: float
    rho0: float
    rho1: float
    rho2: float
    rho0_p: float
    rho0_pp: float
    s: float

    @property
    def identity_residual(self) -> float:
        """``s rho1 + rho2``, zero up to rounding."""
        return self.s * self.rho1 + self.rho2

    def as_dict(self) -> dict[str, float]:
        return {
            "rho": self.rho,
            "rho0": self.rho0,
            "rho1": self.rho1,
            "rho2": self.rho2,
            "rho0_p": self.rho0_p,
            "rho0_pp": self.rho0_pp,
        }


@dataclass(frozen=True)
class TCoefficients:
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


def rho_scalars(phi: ScalarJet, s: float) -> RhoSet:
    if phi.order < 4:
        raise InsufficientJetOrder(f"rho scalars need a phi jet of order 4, got {phi.order}")
    f, f1, f2, f3, f4 = (float(v) for v in phi.derivatives[:5])
    rho0 = f1 * f1 + f * f2
    return RhoSet(
        rho=f * f - s * f * f1,
        rho0=rho0,
        rho1=f * f1 - s * rho0,
        rho2=s * s * rho0 - s * f * f1,
        rho0_p=3.0 * f1 * f2 + f * f3,
        rho0_pp=3.0 * f2 * f2 + 4.0 * f1 * f3 + f * f4,
        s=s,
    )


# ---- index patterns (dense, indices ordered h, i, j, k) ------------------


def _sym3(h: np.ndarray, m: np.ndarray) -> np.ndarray:
    """h_ij m_k + h_jk m_i + h_ik m_j."""
    return np.einsum("ij,k->ijk", h, m) + np.einsum("jk,i->ijk", h, m) + np.einsum("ik,j->ijk", h, m)


def _pairings(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """A_hi B_jk + A_hj B_ik + A_hk B_ij."""
    return np.einsum("hi,jk->hijk", A, B) + np.einsum("hj,ik->hijk", A, B) + np.einsum("hk,ij->hijk", A, B)


def _six(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return _pairings(A, B) + _pairings(B, A)


def _one_three(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Sum over the slot carrying ``u`` of u (x) v (x) v (x) v."""
    return (
        np.einsum("h,i,j,k->hijk", u, v, v, v)
        + np.einsum("h,i,j,k->hijk", v, u, v, v)
        + np.einsum("h,i,j,k->hijk", v, v, u, v)
        + np.einsum("h,i,j,k->hijk", v, v, v, u)
    )


def _m4(m: np.ndarray) -> np.ndarray:
    return np.einsum("h,i,j,k->hijk", m, m, m, m)


class PointState:
    """Everything derived from ``(mp, y, spec)``, computed lazily once."""

    def __init__(self, mp: MetricPoint, y, spec: PhiSpec):
        self.mp = mp
        self.spec = spec
        self.geo: BaseGeometry = eval_geometry(mp, y)
        self.jet = phi_jet(spec, self.geo.s, 4)
        self.rho = rho_scalars(self.jet, self.geo.s)
        d = self.jet.derivatives
        self.phi, self.dphi, self.ddphi = float(d[0]), float(d[1]), float(d[2])
        self.F = self.geo.alpha * self.phi

    @cached_property
    def denominator(self) -> float:
        """rho + m^2 phi phi''."""
        return self.rho.rho + self.geo.m_sq * self.phi * self.ddphi

    @cached_property
    def mu(self) -> tuple[float, float, float]:
        r, g = self.rho, self.geo
        guard("rho", r.rho, error=DegenerateMetric)
        D = guard("rho + m^2 phi phi''", self.denominator, error=DegenerateMetric)
        pp = self.phi * self.ddphi
        mu0 = -pp / (r.rho * D)
        mu1 = -r.rho1 / (r.rho * D)
        mu2 = r.rho1 * (g.s * r.rho + (r.rho1 + g.s * pp) * g.m_sq) / (r.rho**2 * D)
        return mu0, mu1, mu2

    def metric_lower(self) -> np.ndarray:
        r, g, b = self.rho, self.geo, self.mp.b
        a_ = g.alpha_low
        return r.rho * self.mp.a + r.rho0 * np.outer(b, b) + r.rho1 * (np.outer(b, a_) + np.outer(a_, b)) + r.rho2 * np.outer(a_, a_)

    def metric_upper(self) -> np.ndarray:
        mu0, mu1, mu2 = self.mu
        bu, au = self.mp.b_up, self.geo.alpha_up
        return (
            self.mp.a_inv / self.rho.rho
            + mu0 * np.outer(bu, bu)
            + mu1 * (np.outer(bu, au) + np.outer(au, bu))
            + mu2 * np.outer(au, au)
        )

    def mu_system_residuals(self) -> list[float]:
        """Residuals of the four linear equations fixing mu0, mu1, mu2."""
        r, b2, s = self.rho, self.mp.b_sq, self.geo.s
        mu0, mu1, mu2 = self.mu
        return [
            (r.rho + r.rho0 * b2 + s * r.rho1) * mu0 + (r.rho1 + s * r.rho0) * mu1 + r.rho0 / r.rho,
            (b2 * r.rho1 + s * r.rho2) * mu0 + r.rho * mu1 + r.rho1 / r.rho,
            (b2 * r.rho0 + r.rho + s * r.rho1) * mu1 + (r.rho1 + s * r.rho0) * mu2 + r.rho1 / r.rho,
            (b2 * r.rho1 + s * r.rho2) * mu1 + r.rho * mu2 + r.rho2 / r.rho,
        ]

    @cached_property
    def cartan_dense(self) -> np.ndarray:
        r, g = self.rho, self.geo
        m = g.m
        return (r.rho1 / (2 * g.alpha)) * _sym3(g.h, m) + (r.rho0_p / (2 * g.alpha)) * np.einsum("i,j,k->ijk", m, m, m)

    def cartan_lower(self) -> SymmetricTensor:
        return SymmetricTensor.from_dense(self.cartan_dense)

    def ell_covector(self) -> np.ndarray:
        return self.phi * self.geo.alpha_low + self.dphi * self.geo.m

    def cartan_derivative(self) -> SymmetricTensor:
        """Vertical derivative of the Cartan tensor in closed form."""
        r, g = self.rho, self.geo
        h, n, m, s = g.h, g.n_tensor, g.m, g.s
        mm = np.outer(m, m)
        dense = (
            -r.rho1 * _six(h, n)
            - s * r.rho1 * _pairings(h, h)
            - s * r.rho0_p * _six(h, mm)
            + r.rho0_pp * _m4(m)
            - r.rho0_p * _one_three(g.alpha_low, m)
        ) / (2 * g.alpha**2)
        return SymmetricTensor.from_dense(dense)

    @cached_property
    def coefficients(self) -> TCoefficients:
        r, g = self.rho, self.geo
        if g.m_sq < settings.GUARD:
            raise ParallelDirection(f"guarded denominator m^2 = {g.m_sq:.3g} (direction parallel to b)")
        alpha, s, m2 = g.alpha, g.s, g.m_sq
        mu0, mu1, mu2 = self.mu
        D = self.denominator
        pp = self.phi * self.ddphi
        K1 = r.rho1 / (2 * alpha * D)
        K2 = (r.rho * r.rho0_p - 2 * r.rho1 * pp) / (2 * alpha * r.rho * D)
        K1_alt = r.rho1 * (1 + r.rho * mu0 * m2) / (2 * alpha * r.rho)
        K2_alt = r.rho0_p * (1 + r.rho * mu0 * m2) / (2 * alpha * r.rho) + r.rho1 * mu0 / alpha
        helper = (r.rho1 / (2 * alpha)) * (K2 * m2 + r.rho1 / (alpha * r.rho)) - K1 * (
            r.rho1 / alpha + r.rho0_p * m2 / (2 * alpha)
        )
        phi, dphi = self.phi, self.dphi
        Phi = -(r.rho1 * phi / (2 * alpha)) * (s + alpha * K1 * m2)
        Psi = (
            r.rho1 * dphi / alpha
            - r.rho1**2 * phi / (alpha * r.rho)
            - s * r.rho0_p * phi / (2 * alpha)
            - r.rho1 * phi * m2 * K2 / 2
        )
        Omega = (
            r.rho0_pp * phi / (2 * alpha)
            + 2 * r.rho0_p * dphi / alpha
            - 3 * phi * (K2 * (r.rho1 + r.rho0_p * m2 / 2) + r.rho1 * r.rho0_p / (2 * alpha * r.rho))
        )
        scales = np.abs([alpha, r.rho, m2, D])
        conditioning = float(np.max(scales) / np.min(scales))
        if conditioning > 1e8:
            logger.warning("T coefficients at s = %.6g are ill-conditioned (%.2e)", s, conditioning)
        return TCoefficients(
            Phi=Phi,
            Psi=Psi,
            Omega=Omega,
            K1=K1,
            K2=K2,
            mu0=mu0,
            mu1=mu1,
            mu2=mu2,
            conditioning=conditioning,
            K1_alternate=K1_alt,
            K2_alternate=K2_alt,
            helper_identity_residual=helper,
        )

    @cached_property
    def t_dense(self) -> np.ndarray:
        c, g = self.coefficients, self.geo
        h, m = g.h, g.m
        return c.Phi * _pairings(h, h) + c.Psi * _six(h, np.outer(m, m)) + c.Omega * _m4(m)

    def t_lower(self) -> SymmetricTensor:
        return SymmetricTensor.from_dense(self.t_dense)

    def t_raised(self) -> np.ndarray:
        """T^h_ijk from the closed form in h^h_i, m^h and the mu coefficients."""
        c, g, mp = self.coefficients, self.geo, self.mp
        mu0, mu1, _ = self.mu
        h, m = g.h, g.m
        h_up = mp.a_inv @ h
        m_up = g.m_up
        mm = np.outer(m, m)
        lead = (
            c.Phi * (np.einsum("hi,jk->hijk", h_up, h) + np.einsum("hj,ik->hijk", h_up, h) + np.einsum("hk,ij->hijk", h_up, h))
            + c.Psi
            * (
                np.einsum("hk,ij->hijk", h_up, mm)
                + np.einsum("hj,ik->hijk", h_up, mm)
                + np.einsum("hi,jk->hijk", h_up, mm)
                + np.einsum("ij,h,k->hijk", h, m_up, m)
                + np.einsum("jk,i,h->hijk", h, m, m_up)
                + np.einsum("ik,j,h->hijk", h, m, m_up)
            )
            + c.Omega * np.einsum("h,i,j,k->hijk", m_up, m, m, m)
        ) / self.rho.rho
        hm = _sym3(h, m)
        mmm = np.einsum("i,j,k->ijk", m, m, m)
        tail = c.Phi * hm + c.Psi * (g.m_sq * hm + 3 * mmm) + c.Omega * g.m_sq * mmm
        return lead + np.einsum("h,ijk->hijk", mu0 * mp.b_up + mu1 * g.alpha_up, tail)

    def t_raised_numeric(self) -> np.ndarray:
        return np.einsum("hr,rijk->hijk", self.metric_upper(), self.t_dense)


def metric_lower(mp: MetricPoint, y, spec: PhiSpec) -> np.ndarray:
    return PointState(mp, y, spec).metric_lower()


def metric_upper(mp: MetricPoint, y, spec: PhiSpec) -> np.ndarray:
    return PointState(mp, y, spec).metric_upper()


def mu_system_residuals(mp: MetricPoint, y, spec: PhiSpec) -> list[float]:
    return PointState(mp, y, spec).mu_system_residuals()


def cartan_lower(mp: MetricPoint, y, spec: PhiSpec) -> SymmetricTensor:
    return PointState(mp, y, spec).cartan_lower()


def cartan_derivative(mp: MetricPoint, y, spec: PhiSpec) -> SymmetricTensor:
    return PointState(mp, y, spec).cartan_derivative()


def ell_covector(mp: MetricPoint, y, spec: PhiSpec) -> np.ndarray:
    return PointState(mp, y, spec).ell_covector()


def t_coefficients(mp: MetricPoint, y, spec: PhiSpec) -> TCoefficients:
    return PointState(mp, y, spec).coefficients


def t_lower(mp: MetricPoint, y, spec: PhiSpec) -> SymmetricTensor:
    return PointState(mp, y, spec).t_lower()


@dataclass(frozen=True)
class RaisedT:
    closed: np.ndarray
    numeric: np.ndarray

    @property
    def max_deviation(self) -> float:
        return float(np.max(np.abs(self.closed - self.numeric)))


def t_raised(mp: MetricPoint, y, spec: PhiSpec) -> RaisedT:
    state = PointState(mp, y, spec)
    return RaisedT(closed=state.t_raised(), numeric=state.t_raised_numeric())


@dataclass(frozen=True)
class SigmaContraction:
    tensor: SymmetricTensor
    condition_c: float

    @property
    def max_abs(self) -> float:
        return self.tensor.max_abs()


def sigma_contract(sigma, mp: MetricPoint, y, spec: PhiSpec, state: PointState | None = None) -> SigmaContraction:
    """``sigma_h T^h_ijk`` and the diagnostic ``max_j |sigma_j - sigma_0 b_j / (s alpha)|``."""
    state = state or PointState(mp, y, spec)
    sigma = np.asarray(sigma, dtype=float)
    g = state.geo
    guard("s", g.s, error=SDividesZero)
    contraction = np.einsum("h,hijk->ijk", sigma, state.t_raised())
    sigma0 = float(sigma @ g.y)
    condition_c = float(np.max(np.abs(sigma - sigma0 / (g.s * g.alpha) * mp.b)))
    return SigmaContraction(tensor=SymmetricTensor.from_dense(contraction), condition_c=condition_c)
