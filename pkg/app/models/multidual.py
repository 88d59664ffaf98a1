"""Nilpotent multi-dual numbers with four independent units.

A ``MultiDual`` is ``sum_S c_S eps_S`` over subsets ``S`` of ``{1,2,3,4}``,
with every ``eps_a**2 = 0``. Seeding ``y + eps_1 e_h + eps_2 e_i + ...`` and
reading the coefficient of the full subset gives exact mixed partials up to
fourth order.
"""

from __future__ import annotations

from itertools import product
from math import factorial
from typing import Callable, Iterable, Sequence

import numpy as np

from app.core.errors import OrderTooHigh, ZeroDirection
from app.models.jet import power_derivatives

UNITS = 4
SIZE = 1 << UNITS


def _product_tables() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    left, right, out = [], [], []
    for a, b in product(range(SIZE), repeat=2):
        if a & b == 0:
            left.append(a)
            right.append(b)
            out.append(a | b)
    return np.array(left), np.array(right), np.array(out)


_LEFT, _RIGHT, _OUT = _product_tables()


class MultiDual:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[float] | np.ndarray):
        self.coeffs = np.asarray(coeffs, dtype=float)

    @classmethod
    def constant(cls, value: float) -> "MultiDual":
        coeffs = np.zeros(SIZE)
        coeffs[0] = value
        return cls(coeffs)

    @classmethod
    def seeded(cls, value: float, units: Iterable[int]) -> "MultiDual":
        """``value + sum eps_u`` for the given 0-based unit numbers."""
        coeffs = np.zeros(SIZE)
        coeffs[0] = value
        for u in units:
            if not 0 <= u < UNITS:
                raise OrderTooHigh(f"multi-dual numbers carry {UNITS} units, asked for unit {u + 1}")
            coeffs[1 << u] += 1.0
        return cls(coeffs)

    @property
    def real(self) -> float:
        return float(self.coeffs[0])

    def coefficient(self, mask: int) -> float:
        return float(self.coeffs[mask])

    def __repr__(self) -> str:
        return f"MultiDual({self.coeffs.tolist()})"

    # ---- ring operations ---------------------------------------------

    def __add__(self, other):
        if isinstance(other, MultiDual):
            return MultiDual(self.coeffs + other.coeffs)
        out = self.coeffs.copy()
        out[0] += float(other)
        return MultiDual(out)

    __radd__ = __add__

    def __neg__(self):
        return MultiDual(-self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, MultiDual):
            return MultiDual(self.coeffs * float(other))
        weights = self.coeffs[_LEFT] * other.coeffs[_RIGHT]
        return MultiDual(np.bincount(_OUT, weights=weights, minlength=SIZE))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, MultiDual):
            return MultiDual(self.coeffs / float(other))
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * float(other)

    # ---- composition --------------------------------------------------

    def compose(self, derivs: Sequence[float]) -> "MultiDual":
        """``f(self)`` from ``f, f', ..., f''''`` at the real part.

        The nilpotent part ``N`` satisfies ``N**5 = 0``, so the Taylor sum
        stops at the fourth power.
        """

        nil = self.coeffs.copy()
        nil[0] = 0.0
        nil_md = MultiDual(nil)
        out = np.zeros(SIZE)
        out[0] = derivs[0]
        power = MultiDual.constant(1.0)
        for k in range(1, min(UNITS, len(derivs) - 1) + 1):
            power = power * nil_md
            out += derivs[k] / factorial(k) * power.coeffs
        return MultiDual(out)

    def reciprocal(self) -> "MultiDual":
        x = self.real
        if x == 0.0:
            raise ZeroDivisionError("multi-dual reciprocal of a zero real part")
        return self.compose(power_derivatives(x, -1, UNITS))

    def sqrt(self) -> "MultiDual":
        return self.compose(power_derivatives(self.real, 0.5, UNITS))


def mixed_partial(fn: Callable[[list[MultiDual]], MultiDual], y: Sequence[float], indices: Sequence[int]) -> float:
    """Exact ``d^k fn / dy^{i1} ... dy^{ik}`` at ``y`` for ``k = len(indices) <= 4``."""

    if len(indices) > UNITS:
        raise OrderTooHigh(f"mixed partials are available up to order {UNITS}")
    if not np.all(np.isfinite(y)):
        raise ZeroDirection("direction has non-finite components")
    seeds: list[list[int]] = [[] for _ in range(len(y))]
    for unit, axis in enumerate(indices):
        seeds[axis].append(unit)
    args = [MultiDual.seeded(float(v), units) for v, units in zip(y, seeds)]
    return fn(args).coefficient((1 << len(indices)) - 1)
