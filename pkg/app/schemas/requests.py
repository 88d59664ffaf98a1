"""Request bodies of the analysis endpoints."""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field

from app.models.phi import PhiSpec, QSpec
from app.schemas.fixture import MetricPointIn
from app.services.ode_lab import OdeCheck


class FixtureRequest(BaseModel):
    # A bundled fixture name or an inline metric point.
    fixture: str | MetricPointIn = "standard"
    phi: PhiSpec


class TensorRequest(FixtureRequest):
    y: Optional[list[float]] = None
    s: Optional[float] = None


class ClassifyRequest(FixtureRequest):
    grid: Optional[list[float]] = None
    grid_size: int = Field(default=33, ge=3)


class VerifyRequest(FixtureRequest):
    samples: int = Field(default=20, ge=1, le=200)
    seed: int = 0


class OdeCheckRequest(BaseModel):
    check: OdeCheck
    params: dict[str, float] = Field(default_factory=dict)
    q: Optional[QSpec] = None
    grid: Optional[list[float]] = None
    grid_size: int = Field(default=33, ge=3)
