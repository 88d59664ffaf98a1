from __future__ import annotations

from itertools import permutations

import numpy as np
import pytest

from app.core.errors import DimensionMismatch
from app.models.symmetric import SymmetricTensor


def symmetric3(rng):
    raw = rng.standard_normal((3, 3, 3))
    return sum(np.transpose(raw, p) for p in permutations(range(3))) / 6


def test_stores_one_component_per_multiset(rng):
    t = SymmetricTensor.from_dense(symmetric3(rng))
    assert len(t.components) == 10
    assert t.index_order[0] == (0, 0, 0)


def test_any_index_order_reads_the_same_slot(rng):
    dense = symmetric3(rng)
    t = SymmetricTensor.from_dense(dense)
    for idx in permutations((0, 1, 2)):
        assert t[idx] == pytest.approx(dense[0, 1, 2])
    np.testing.assert_allclose(t.to_dense(), dense, atol=1e-15)
    assert t.asymmetry < 1e-15


def test_asymmetry_is_reported(rng):
    dense = rng.standard_normal((2, 2))
    assert SymmetricTensor.from_dense(dense).asymmetry > 0


def test_wrong_component_count():
    with pytest.raises(DimensionMismatch):
        SymmetricTensor(3, 2, np.zeros(5))


def test_max_abs():
    t = SymmetricTensor(2, 2, np.array([1.0, -3.0, 2.0]))
    assert t.max_abs() == 3.0
