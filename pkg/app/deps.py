"""Common dependencies (tolerance, fixture resolution)."""

from __future__ import annotations

from fastapi import Query

from app.core.config import settings
from app.core.errors import ConfigError
from app.fixtures import load_fixture
from app.models.geometry import MetricPoint
from app.schemas.fixture import MetricPointIn


def resolve_tol(tol: float | None = Query(default=None, gt=0)) -> float:
    return tol if tol is not None else settings.TOL


def resolve_fixture(fixture: str | MetricPointIn) -> MetricPoint:
    if isinstance(fixture, MetricPointIn):
        return fixture.to_metric_point()
    # Only bundled names are reachable over HTTP.
    if "/" in fixture or "\\" in fixture or "." in fixture:
        raise ConfigError(f"unknown fixture {fixture!r}")
    return load_fixture(fixture)
