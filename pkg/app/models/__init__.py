from app.models.geometry import BaseGeometry, MetricPoint, eval_geometry, make_metric_point
from app.models.phi import PhiFamily, PhiSpec, QKind, QSpec

__all__ = [
    "BaseGeometry",
    "MetricPoint",
    "PhiFamily",
    "PhiSpec",
    "QKind",
    "QSpec",
    "eval_geometry",
    "make_metric_point",
]
