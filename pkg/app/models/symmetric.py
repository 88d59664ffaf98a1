"""Totally symmetric tensors stored by index multiset."""

from __future__ import annotations

from itertools import combinations_with_replacement, permutations, product

import numpy as np

from app.core.errors import DimensionMismatch


class SymmetricTensor:
    """Rank-``r`` symmetric tensor over ``dim`` coordinates.

    Only the ``C(dim + r - 1, r)`` components with sorted indices are stored;
    reading any index tuple sorts it first.
    """

    __slots__ = ("dim", "rank", "index_order", "components", "asymmetry", "_slot")

    def __init__(self, dim: int, rank: int, components: np.ndarray, asymmetry: float = 0.0):
        self.dim = dim
        self.rank = rank
        self.index_order = list(combinations_with_replacement(range(dim), rank))
        self.components = np.asarray(components, dtype=float)
        if self.components.shape != (len(self.index_order),):
            raise DimensionMismatch(
                f"expected {len(self.index_order)} components for dim={dim} rank={rank}, "
                f"got {self.components.shape}"
            )
        self.asymmetry = asymmetry
        self._slot = {idx: pos for pos, idx in enumerate(self.index_order)}

    @classmethod
    def from_dense(cls, dense: np.ndarray, check: bool = True) -> "SymmetricTensor":
        dense = np.asarray(dense, dtype=float)
        rank = dense.ndim
        dim = dense.shape[0]
        if any(n != dim for n in dense.shape):
            raise DimensionMismatch(f"tensor shape {dense.shape} is not square")
        order = list(combinations_with_replacement(range(dim), rank))
        components = np.array([dense[idx] for idx in order]) if rank else dense.reshape(1)
        asymmetry = 0.0
        if check and rank > 1:
            asymmetry = max(
                float(np.max(np.abs(dense - np.transpose(dense, perm)))) for perm in permutations(range(rank))
            )
        return cls(dim, rank, components, asymmetry)

    def __getitem__(self, index: tuple[int, ...]) -> float:
        return float(self.components[self._slot[tuple(sorted(index))]])

    def to_dense(self) -> np.ndarray:
        dense = np.empty((self.dim,) * self.rank)
        for idx in product(range(self.dim), repeat=self.rank):
            dense[idx] = self[idx]
        return dense

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.components))) if self.components.size else 0.0

