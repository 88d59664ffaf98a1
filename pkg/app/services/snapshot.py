"""All tensors at one supporting element, packaged as a ``TensorReport``."""

from __future__ import annotations

import logging
from dataclasses import asdict
from itertools import product
from typing import Iterator, Sequence

import numpy as np

from app.core.errors import ConfigError, DimensionMismatch, ParallelDirection
from app.models.geometry import MetricPoint, geometry_residuals, realize_direction
from app.models.phi import PhiSpec
from app.models.symmetric import SymmetricTensor
from app.schemas.reports import GeometryOut, TCoefficientsOut, TensorOut, TensorReport
from app.services.tensor_engine import PointState

logger = logging.getLogger(__name__)


def tensor_out(tensor: SymmetricTensor | np.ndarray) -> TensorOut:
    """Symmetric tensors keep one component per index multiset; anything
    else (the raised T) is flattened over full indices."""

    if isinstance(tensor, SymmetricTensor):
        return TensorOut(
            dim=tensor.dim,
            rank=tensor.rank,
            index_order=[list(idx) for idx in tensor.index_order],
            components=[float(v) for v in tensor.components],
            asymmetry=tensor.asymmetry,
        )
    dense = np.asarray(tensor, dtype=float)
    order = list(product(range(dense.shape[0]), repeat=dense.ndim))
    return TensorOut(
        dim=dense.shape[0],
        rank=dense.ndim,
        index_order=[list(idx) for idx in order],
        components=[float(dense[idx]) for idx in order],
    )


def resolve_direction(mp: MetricPoint, y: Sequence[float] | None, s: float | None) -> np.ndarray:
    if y is not None and s is not None:
        raise ConfigError("give either a direction y or a value of s, not both")
    if y is not None:
        y = np.asarray(y, dtype=float)
        if y.shape != (mp.dim,):
            raise DimensionMismatch(f"direction has {y.size} components, fixture has dim {mp.dim}")
        return y
    if s is None:
        s = 0.5 * mp.b_norm
    return realize_direction(mp, s)


def tensor_report(mp: MetricPoint, spec: PhiSpec, y: Sequence[float] | None = None, s: float | None = None) -> TensorReport:
    """g, g^-1 and C at one direction, plus T when ``m^2 > 0``.

    A direction parallel to b leaves the T-coefficients undefined; the report
    then lists the missing fields under ``unavailable`` instead of failing.
    """

    state = PointState(mp, resolve_direction(mp, y, s), spec)
    geo = state.geo
    logger.info("tensors of %s at s = %.6g", spec.label, geo.s)
    report = TensorReport(
        phi=spec.model_dump(mode="json"),
        geometry=GeometryOut(
            y=[float(v) for v in geo.y],
            alpha=geo.alpha,
            beta=geo.beta,
            s=geo.s,
            m_sq=geo.m_sq,
            F=state.F,
            residuals=geometry_residuals(mp, geo),
        ),
        rho=state.rho.as_dict(),
        mu_system_residuals=state.mu_system_residuals(),
        tensors={
            "g": tensor_out(SymmetricTensor.from_dense(state.metric_lower())),
            "g_inv": tensor_out(SymmetricTensor.from_dense(state.metric_upper())),
            "C": tensor_out(state.cartan_lower()),
        },
    )
    try:
        coefficients = state.coefficients
    except ParallelDirection as exc:
        logger.warning("T-tensor skipped: %s", exc)
        report.unavailable = {name: str(exc) for name in ("coefficients", "T", "T_raised")}
        return report
    raised = state.t_raised()
    report.coefficients = TCoefficientsOut(**asdict(coefficients))
    report.tensors["T"] = tensor_out(state.t_lower())
    report.tensors["T_raised"] = tensor_out(raised)
    report.raised_paths_max_deviation = float(np.max(np.abs(raised - state.t_raised_numeric())))
    return report


def tensor_csv_rows(report: TensorReport) -> Iterator[tuple[str, str, float]]:
    """``(tensor, index, value)`` over full indices, lexicographically."""
    for name in sorted(report.tensors):
        out = report.tensors[name]
        table = {tuple(idx): v for idx, v in zip(out.index_order, out.components)}
        for idx in product(range(out.dim), repeat=out.rank):
            value = table.get(idx, table.get(tuple(sorted(idx))))
            yield name, " ".join(str(i) for i in idx), value
