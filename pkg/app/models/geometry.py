"""Base Riemannian data at a point and per-direction scalars."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve, solve_triangular

from app.core.config import settings
from app.core.errors import DimensionMismatch, NotPositiveDefinite, NotSymmetric, OutOfDomain, ZeroDirection

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class MetricPoint:
    dim: int
    a: np.ndarray
    b: np.ndarray
    b_sq: float
    b0: float

    @cached_property
    def factor(self) -> tuple[np.ndarray, bool]:
        return cho_factor(self.a, lower=True)

    @cached_property
    def a_inv(self) -> np.ndarray:
        return cho_solve(self.factor, np.eye(self.dim))

    @cached_property
    def b_up(self) -> np.ndarray:
        return self.a_inv @ self.b

    @cached_property
    def cholesky(self) -> np.ndarray:
        """Lower factor ``L`` with ``a = L L^T``."""
        return np.tril(self.factor[0])

    @property
    def b_norm(self) -> float:
        return float(np.sqrt(self.b_sq))

    @property
    def regime(self) -> str:
        if abs(self.b_norm - self.b0) <= settings.IDENTITY_TOL * max(1.0, self.b0):
            return "almost-regular"
        return "regular"


@dataclass(frozen=True, eq=False)
class Direction:
    y: np.ndarray = field(repr=True)

    @classmethod
    def of(cls, y) -> "Direction":
        return y if isinstance(y, Direction) else cls(np.asarray(y, dtype=float))


@dataclass(frozen=True, eq=False)
class BaseGeometry:
    y: np.ndarray
    alpha: float
    beta: float
    s: float
    alpha_low: np.ndarray
    alpha_up: np.ndarray
    m: np.ndarray
    m_up: np.ndarray
    m_sq: float
    h: np.ndarray
    n_tensor: np.ndarray


def make_metric_point(a, b, b0: float) -> MetricPoint:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"a must be a square matrix, got shape {a.shape}")
    dim = a.shape[0]
    if b.shape != (dim,):
        raise DimensionMismatch(f"b has shape {b.shape}, expected ({dim},)")
    if dim < 2:
        raise DimensionMismatch("at least two coordinates are required")
    if np.max(np.abs(a - a.T)) > settings.IDENTITY_TOL * max(1.0, float(np.max(np.abs(a)))):
        raise NotSymmetric(f"a is not symmetric (max |a - a^T| = {float(np.max(np.abs(a - a.T))):.3g})")
    try:
        factor = cho_factor(a, lower=True)
    except LinAlgError as exc:
        raise NotPositiveDefinite(f"a is not positive definite: {exc}") from exc
    b_sq = float(b @ cho_solve(factor, b))
    if b_sq <= 0.0:
        raise OutOfDomain("the one-form b must be nonzero (b^2 > 0)")
    if np.sqrt(b_sq) > b0 * (1.0 + settings.IDENTITY_TOL):
        raise OutOfDomain(f"|b| = {np.sqrt(b_sq):.6g} exceeds the regularity bound b0 = {b0:.6g}")
    mp = MetricPoint(dim=dim, a=a, b=b, b_sq=b_sq, b0=float(b0))
    if mp.regime == "almost-regular":
        logger.warning("metric point sits on the almost-regular boundary |b| = b0 = %g", b0)
    return mp


def eval_geometry(mp: MetricPoint, y) -> BaseGeometry:
    y = Direction.of(y).y
    if y.shape != (mp.dim,):
        raise DimensionMismatch(f"direction has shape {y.shape}, expected ({mp.dim},)")
    ay = mp.a @ y
    alpha_sq = float(y @ ay)
    if not alpha_sq > settings.GUARD**2:
        raise ZeroDirection(f"alpha(y) = {np.sqrt(max(alpha_sq, 0.0)):.3g} vanishes")
    alpha = float(np.sqrt(alpha_sq))
    beta = float(mp.b @ y)
    s = beta / alpha
    alpha_low = ay / alpha
    alpha_up = y / alpha
    m = mp.b - s * alpha_low
    m_sq = mp.b_sq - s * s
    if m_sq < settings.GUARD:
        logger.warning("direction is parallel to b (m^2 = %.3g)", m_sq)
    h = mp.a - np.outer(alpha_low, alpha_low)
    n_tensor = np.outer(alpha_low, m) + np.outer(m, alpha_low)
    return BaseGeometry(
        y=y,
        alpha=alpha,
        beta=beta,
        s=s,
        alpha_low=alpha_low,
        alpha_up=alpha_up,
        m=m,
        m_up=mp.a_inv @ m,
        m_sq=m_sq,
        h=h,
        n_tensor=n_tensor,
    )


def geometry_residuals(mp: MetricPoint, geo: BaseGeometry) -> dict[str, float]:
    """Residuals of the pointwise identities satisfied by ``m_i`` and ``h_ij``."""
    y_norm = float(np.linalg.norm(geo.y))
    m_norm = float(np.linalg.norm(geo.m))
    return {
        "y_dot_m": abs(float(geo.y @ geo.m)) / max(1.0, y_norm * m_norm),
        "b_dot_h_minus_m": float(np.max(np.abs(mp.b_up @ geo.h - geo.m))),
        "m_dot_m_minus_m_sq": abs(float(geo.m_up @ geo.m) - geo.m_sq),
        "b_dot_m_minus_m_sq": abs(float(mp.b_up @ geo.m) - geo.m_sq),
        "h_dot_y": float(np.max(np.abs(geo.h @ geo.y))),
    }


def realize_direction(mp: MetricPoint, s: float, rng: np.random.Generator | None = None) -> np.ndarray:
    """Unit-alpha direction with ``beta / alpha = s`` exactly (up to rounding).

    In coordinates ``z = L^T y`` the metric is Euclidean and ``beta = c . z`` with
    ``c = L^{-1} b``. The transverse part is a seeded random unit vector
    orthogonal to ``c`` or, without ``rng``, the coordinate axis least aligned
    with ``c``.
    """

    b_norm = mp.b_norm
    if abs(s) > b_norm:
        raise OutOfDomain(f"|s| = {abs(s):.6g} exceeds |b| = {b_norm:.6g}")
    L = mp.cholesky
    c = solve_triangular(L, mp.b, lower=True)
    c_hat = c / b_norm
    if rng is None:
        trial = np.zeros(mp.dim)
        trial[int(np.argmin(np.abs(c_hat)))] = 1.0
    else:
        trial = rng.standard_normal(mp.dim)
    perp = trial - (trial @ c_hat) * c_hat
    perp /= np.linalg.norm(perp)
    z = (s / b_norm) * c_hat + np.sqrt(max(0.0, 1.0 - s * s / mp.b_sq)) * perp
    return solve_triangular(L.T, z, lower=False)
