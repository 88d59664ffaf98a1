"""Truncated Taylor jets in one real variable.

A ``ScalarJet`` of order ``k`` stores normalized Taylor coefficients
``c_0..c_k`` of a function around a point, so ``f(x0 + t) = sum c_j t^j + O(t^{k+1})``.
All arithmetic is exact at the coefficient level (Cauchy products, series
division, composition with the derivative list of an outer function).
"""

from __future__ import annotations

from math import factorial
from typing import Sequence

import numpy as np

from app.core.errors import OutOfDomain


def power_derivatives(t: float, p: float, order: int) -> list[float]:
    """Derivatives ``d^k/dt^k t**p`` for ``k = 0..order``."""

    if t <= 0 and not float(p).is_integer():
        raise OutOfDomain(f"t**{p} needs t > 0, got t = {t:.6g}")
    out = []
    coeff = 1.0
    for k in range(order + 1):
        out.append(coeff * t ** (p - k))
        coeff *= p - k
    return out


class ScalarJet:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[float] | np.ndarray):
        self.coeffs = np.asarray(coeffs, dtype=float)

    # ---- constructors -------------------------------------------------

    @classmethod
    def constant(cls, value: float, order: int) -> "ScalarJet":
        coeffs = np.zeros(order + 1)
        coeffs[0] = value
        return cls(coeffs)

    @classmethod
    def variable(cls, value: float, order: int) -> "ScalarJet":
        coeffs = np.zeros(order + 1)
        coeffs[0] = value
        if order >= 1:
            coeffs[1] = 1.0
        return cls(coeffs)

    @classmethod
    def from_derivatives(cls, derivs: Sequence[float]) -> "ScalarJet":
        return cls([d / factorial(k) for k, d in enumerate(derivs)])

    # ---- views --------------------------------------------------------

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def value(self) -> float:
        return float(self.coeffs[0])

    @property
    def derivatives(self) -> np.ndarray:
        return np.array([c * factorial(k) for k, c in enumerate(self.coeffs)])

    def derivative(self) -> "ScalarJet":
        """Jet of f' with one order less."""
        k = np.arange(1, len(self.coeffs))
        return ScalarJet(self.coeffs[1:] * k)

    def truncate(self, order: int) -> "ScalarJet":
        return ScalarJet(self.coeffs[: order + 1])

    def __repr__(self) -> str:
        return f"ScalarJet(derivatives={self.derivatives.tolist()})"

    # ---- arithmetic ---------------------------------------------------

    def _coerce(self, other: "ScalarJet | float") -> "ScalarJet":
        if isinstance(other, ScalarJet):
            if other.order != self.order:
                n = min(self.order, other.order)
                return other.truncate(n)
            return other
        return ScalarJet.constant(float(other), self.order)

    def _common(self, other: "ScalarJet | float") -> tuple[np.ndarray, np.ndarray]:
        other = self._coerce(other)
        n = min(self.order, other.order)
        return self.coeffs[: n + 1], other.coeffs[: n + 1]

    def __add__(self, other):
        a, b = self._common(other)
        return ScalarJet(a + b)

    __radd__ = __add__

    def __sub__(self, other):
        a, b = self._common(other)
        return ScalarJet(a - b)

    def __rsub__(self, other):
        a, b = self._common(other)
        return ScalarJet(b - a)

    def __neg__(self):
        return ScalarJet(-self.coeffs)

    def __mul__(self, other):
        if not isinstance(other, ScalarJet):
            return ScalarJet(self.coeffs * float(other))
        a, b = self._common(other)
        return ScalarJet(np.convolve(a, b)[: len(a)])

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, ScalarJet):
            return ScalarJet(self.coeffs / float(other))
        a, b = self._common(other)
        # Series division: q_k = (a_k - sum_{j<k} q_j b_{k-j}) / b_0
        q = np.zeros_like(a)
        for k in range(len(a)):
            q[k] = (a[k] - np.dot(q[:k], b[k:0:-1])) / b[0]
        return ScalarJet(q)

    def __rtruediv__(self, other):
        return ScalarJet.constant(float(other), self.order) / self

    def __pow__(self, p: float):
        if isinstance(p, int) and p >= 0:
            out = ScalarJet.constant(1.0, self.order)
            for _ in range(p):
                out = out * self
            return out
        return self.compose(power_derivatives(self.value, p, self.order))

    # ---- composition --------------------------------------------------

    def compose(self, derivs: Sequence[float]) -> "ScalarJet":
        """Return ``f(self)`` given ``f, f', f'', ...`` at ``self.value``.

        Uses ``f(x0 + d) = sum_k f^(k)(x0) d^k / k!`` where ``d`` has zero
        constant term, so ``d^k`` vanishes beyond the jet order.
        """

        n = self.order
        if len(derivs) < n + 1:
            raise ValueError(f"composition needs {n + 1} outer derivatives, got {len(derivs)}")
        nil = self.coeffs.copy()
        nil[0] = 0.0
        out = np.zeros(n + 1)
        out[0] = derivs[0]
        power = np.zeros(n + 1)
        power[0] = 1.0
        for k in range(1, n + 1):
            power = np.convolve(power, nil)[: n + 1]
            out += derivs[k] / factorial(k) * power
        return ScalarJet(out)

    def exp(self) -> "ScalarJet":
        e = float(np.exp(self.value))
        return self.compose([e] * (self.order + 1))

    def sqrt(self) -> "ScalarJet":
        return self.compose(power_derivatives(self.value, 0.5, self.order))

    def atan(self) -> "ScalarJet":
        if self.order > 4:
            raise ValueError("atan jets are provided up to order 4")
        x = self.value
        u = 1.0 / (1.0 + x * x)
        derivs = [
            float(np.arctan(x)),
            u,
            -2.0 * x * u**2,
            (6.0 * x * x - 2.0) * u**3,
            24.0 * x * (1.0 - x * x) * u**4,
        ]
        return self.compose(derivs[: self.order + 1])
