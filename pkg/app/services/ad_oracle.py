"""Definition-based tensors from exact mixed partials of F^2.

Nothing here uses the rho/mu closed forms: g, C and the vertical derivative of
C come from multi-dual differentiation of ``F^2 = alpha^2 phi(beta/alpha)^2``
and the T-tensor is assembled term by term from its definition with a
numerically inverted g.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import combinations_with_replacement, permutations
from typing import Sequence

import numpy as np

from app.core.config import settings
from app.core.errors import DegenerateMetric, DimensionMismatch, ZeroDirection
from app.models.geometry import Direction, MetricPoint
from app.models.jet import ScalarJet
from app.models.multidual import MultiDual, mixed_partial
from app.models.phi import PhiSpec, phi_jet
from app.models.symmetric import SymmetricTensor
from app.schemas.reports import ComparisonReport

logger = logging.getLogger(__name__)


def f_squared(mp: MetricPoint, y: Sequence[MultiDual], spec: PhiSpec, jet: ScalarJet | None = None) -> MultiDual:
    """F^2 through multi-dual alpha, beta and s; phi enters through its order-4 jet."""

    if len(y) != mp.dim:
        raise DimensionMismatch(f"direction has {len(y)} components, expected {mp.dim}")
    ay = [sum((float(mp.a[i, j]) * y[j] for j in range(mp.dim)), MultiDual.constant(0.0)) for i in range(mp.dim)]
    alpha_sq = sum((y[i] * ay[i] for i in range(mp.dim)), MultiDual.constant(0.0))
    if not alpha_sq.real > settings.GUARD**2:
        raise ZeroDirection("alpha(y) vanishes")
    alpha = alpha_sq.sqrt()
    beta = sum((float(mp.b[i]) * y[i] for i in range(mp.dim)), MultiDual.constant(0.0))
    s = beta / alpha
    if jet is None:
        jet = phi_jet(spec, s.real, 4)
    phi = s.compose(jet.derivatives)
    return alpha_sq * phi * phi


class Oracle:
    """Mixed partials of F^2 at one real direction, phi jet computed once."""

    def __init__(self, mp: MetricPoint, y, spec: PhiSpec):
        self.mp = mp
        self.spec = spec
        self.y = Direction.of(y).y
        alpha = float(np.sqrt(self.y @ mp.a @ self.y))
        if not alpha > settings.GUARD:
            raise ZeroDirection(f"alpha(y) = {alpha:.3g} vanishes")
        self.s = float(mp.b @ self.y) / alpha
        self.jet = phi_jet(spec, self.s, 4)

    def _fn(self, args: list[MultiDual]) -> MultiDual:
        return f_squared(self.mp, args, self.spec, self.jet)

    def partial(self, indices: Sequence[int]) -> float:
        return mixed_partial(self._fn, self.y, indices)

    def _symmetric(self, rank: int, scale: float) -> np.ndarray:
        n = self.mp.dim
        dense = np.empty((n,) * rank)
        for idx in combinations_with_replacement(range(n), rank):
            value = scale * self.partial(idx)
            for perm in _permutations(idx):
                dense[perm] = value
        return dense

    def F(self) -> float:
        return float(np.sqrt(self._fn([MultiDual.constant(v) for v in self.y]).real))

    def ell(self) -> np.ndarray:
        return np.array([self.partial((i,)) for i in range(self.mp.dim)]) / (2 * self.F())

    def metric(self) -> np.ndarray:
        return self._symmetric(2, 0.5)

    def cartan(self) -> np.ndarray:
        return self._symmetric(3, 0.25)

    def cartan_derivative(self) -> np.ndarray:
        return self._symmetric(4, 0.25)


def _permutations(idx: tuple[int, ...]) -> set[tuple[int, ...]]:
    return set(permutations(idx))


def oracle_metric(mp: MetricPoint, y, spec: PhiSpec) -> np.ndarray:
    return Oracle(mp, y, spec).metric()


def oracle_cartan(mp: MetricPoint, y, spec: PhiSpec) -> SymmetricTensor:
    return SymmetricTensor.from_dense(Oracle(mp, y, spec).cartan())


@dataclass(frozen=True)
class OracleT:
    tensor: SymmetricTensor
    terms: dict[str, float]


def oracle_t(mp: MetricPoint, y, spec: PhiSpec, oracle: Oracle | None = None) -> OracleT:
    """T_hijk = F dC_hijk - F (C C^ pairings) + (C l over the four slots)."""

    oracle = oracle or Oracle(mp, y, spec)
    g = oracle.metric()
    try:
        cond = np.linalg.cond(g)
    except np.linalg.LinAlgError as exc:
        raise DegenerateMetric(f"oracle metric is singular: {exc}") from exc
    if not np.isfinite(cond) or cond > 1.0 / settings.GUARD:
        raise DegenerateMetric(f"oracle metric is singular (condition number {cond:.3g})")
    g_inv = np.linalg.inv(g)
    C = oracle.cartan()
    dC = oracle.cartan_derivative()
    ell = oracle.ell()
    F = oracle.F()
    C_up = np.einsum("sr,rhk->shk", g_inv, C)
    cc = (
        np.einsum("sij,shk->hijk", C, C_up)
        + np.einsum("sik,shj->hijk", C, C_up)
        + np.einsum("sih,sjk->hijk", C, C_up)
    )
    cl = (
        np.einsum("hij,k->hijk", C, ell)
        + np.einsum("hik,j->hijk", C, ell)
        + np.einsum("hjk,i->hijk", C, ell)
        + np.einsum("ijk,h->hijk", C, ell)
    )
    first, second = F * dC, F * cc
    T = first - second + cl
    terms = {
        "F_dC": float(np.max(np.abs(first))),
        "F_CC": float(np.max(np.abs(second))),
        "C_ell": float(np.max(np.abs(cl))),
    }
    return OracleT(tensor=SymmetricTensor.from_dense(T), terms=terms)


def compare(closed, oracle, terms: dict[str, float] | None = None) -> ComparisonReport:
    """Componentwise deviation between a closed-form and an oracle tensor.

    ``max_rel`` is floored: ``max_abs / max(1, max|oracle|)``, so oracle
    tensors with entries below one are compared absolutely.
    """

    a = closed.to_dense() if isinstance(closed, SymmetricTensor) else np.asarray(closed, dtype=float)
    b = oracle.to_dense() if isinstance(oracle, SymmetricTensor) else np.asarray(oracle, dtype=float)
    if a.shape != b.shape:
        raise DimensionMismatch(f"cannot compare shapes {a.shape} and {b.shape}")
    diff = np.abs(a - b)
    worst = np.unravel_index(int(np.argmax(diff)), diff.shape) if diff.size else ()
    max_abs = float(np.max(diff)) if diff.size else 0.0
    scale = float(np.max(np.abs(b))) if b.size else 0.0
    return ComparisonReport(
        max_abs=max_abs,
        max_rel=max_abs / max(1.0, scale),
        argmax=[int(i) for i in worst],
        oracle_scale=scale,
        terms=terms or {},
    )
