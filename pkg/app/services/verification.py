"""Closed form against oracle over a seeded set of supporting elements."""

from __future__ import annotations

import logging

import numpy as np

from app.models.geometry import MetricPoint, realize_direction
from app.models.phi import PhiSpec
from app.schemas.reports import ComparisonReport, VerificationReport, VerificationSample
from app.services.ad_oracle import Oracle, compare, oracle_t
from app.services.tensor_engine import PointState

logger = logging.getLogger(__name__)

DEFAULT_SAMPLES = 20
VERIFY_TOL = 1e-9


def oracle_samples(mp: MetricPoint, spec: PhiSpec, n: int = DEFAULT_SAMPLES, seed: int = 0) -> list[np.ndarray]:
    """``n`` directions with s evenly spread over [0.3b, 0.85b] (or [-0.85b, 0.85b]).

    The transverse part and the overall length of each direction are drawn
    from a generator seeded with ``seed``.
    """

    rng = np.random.default_rng(seed)
    b = mp.b_norm
    lo = 0.3 * b if spec.domain().positive else -0.85 * b
    dom = spec.domain()
    directions = []
    for s in np.linspace(lo, 0.85 * b, n):
        if not dom.contains(float(s)):
            continue
        y = realize_direction(mp, float(s), rng)
        directions.append(rng.uniform(0.5, 2.0) * y)
    return directions


def verify_point(mp: MetricPoint, y, spec: PhiSpec) -> VerificationSample:
    state = PointState(mp, y, spec)
    oracle = Oracle(mp, y, spec)
    ot = oracle_t(mp, y, spec, oracle)
    comparisons: dict[str, ComparisonReport] = {
        "metric": compare(state.metric_lower(), oracle.metric()),
        "inverse": compare(state.metric_upper() @ state.metric_lower(), np.eye(mp.dim)),
        "cartan": compare(state.cartan_dense, oracle.cartan()),
        "cartan_derivative": compare(state.cartan_derivative(), oracle.cartan_derivative()),
        "ell": compare(state.ell_covector(), oracle.ell()),
        "t": compare(state.t_lower(), ot.tensor, terms=ot.terms),
        "t_raised_paths": compare(state.t_raised(), state.t_raised_numeric()),
    }
    return VerificationSample(s=state.geo.s, y=[float(v) for v in state.geo.y], comparisons=comparisons)


def verify_family(
    mp: MetricPoint,
    spec: PhiSpec,
    n: int = DEFAULT_SAMPLES,
    seed: int = 0,
    tol: float = VERIFY_TOL,
    directions: list | None = None,
) -> VerificationReport:
    if directions is None:
        directions = oracle_samples(mp, spec, n, seed)
    samples = [verify_point(mp, y, spec) for y in directions]
    worst: dict[str, float] = {}
    for sample in samples:
        for key, report in sample.comparisons.items():
            worst[key] = max(worst.get(key, 0.0), report.max_rel)
    passed = bool(samples) and all(v <= tol for v in worst.values())
    logger.info("verified %s on %d samples: worst %s", spec.label, len(samples), worst)
    return VerificationReport(
        phi=spec.model_dump(mode="json"),
        tol=tol,
        samples=samples,
        worst=worst,
        passed=passed,
    )
