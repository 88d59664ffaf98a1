"""Typed errors shared by the library, the CLI and the HTTP layer.

Each error class carries the process exit code the CLI maps it to.
"""

from __future__ import annotations

import math

from app.core.config import settings


class FinslerError(Exception):
    exit_code = 3


class ConfigError(FinslerError):
    exit_code = 2


class AcceptanceFailure(FinslerError):
    exit_code = 1


class DomainError(FinslerError):
    exit_code = 3


class NotPositiveDefinite(DomainError):
    pass


class NotSymmetric(NotPositiveDefinite):
    pass


class DimensionMismatch(DomainError):
    pass


class DimensionTooSmall(DomainError):
    pass


class ZeroDirection(DomainError):
    pass


class OutOfDomain(DomainError):
    pass


class BoundaryS(OutOfDomain):
    pass


class OrderTooHigh(DomainError):
    pass


class InsufficientJetOrder(DomainError):
    pass


class DegenerateDenominator(DomainError):
    pass


class DegenerateMetric(DegenerateDenominator):
    pass


class ParallelDirection(DegenerateDenominator):
    pass


class SDividesZero(DegenerateDenominator):
    pass


class QuadratureFailure(DomainError):
    pass


class PoleOnPath(DomainError):
    pass


class EmptyGrid(DomainError):
    pass


class UnsupportedParameterRange(DomainError):
    pass


def guard(
    name: str,
    value: float,
    threshold: float | None = None,
    error: type[DomainError] = DegenerateDenominator,
) -> float:
    """Return ``value`` unless its magnitude is below ``threshold``.

    The raised message names the guarded quantity so that CLI users see which
    denominator tripped.
    """

    if threshold is None:
        threshold = settings.GUARD
    if not math.isfinite(value) or abs(value) < threshold:
        raise error(f"guarded denominator {name} = {value:.6g} is below threshold {threshold:.1e}")
    return value
