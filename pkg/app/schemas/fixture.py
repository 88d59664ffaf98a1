from __future__ import annotations

from pydantic import BaseModel, Field, model_validator

from app.models.geometry import MetricPoint, make_metric_point


class MetricPointIn(BaseModel):
    """Fixture document: ``{"dim": n, "a": [[...]], "b": [...], "b0": r}``."""

    dim: int = Field(ge=2)
    a: list[list[float]]
    b: list[float]
    b0: float = Field(gt=0)

    @model_validator(mode="after")
    def _shapes(self) -> "MetricPointIn":
        if len(self.a) != self.dim or any(len(row) != self.dim for row in self.a):
            raise ValueError(f"a must be {self.dim}x{self.dim}")
        if len(self.b) != self.dim:
            raise ValueError(f"b must have {self.dim} components")
        return self

    def to_metric_point(self) -> MetricPoint:
        return make_metric_point(self.a, self.b, self.b0)
