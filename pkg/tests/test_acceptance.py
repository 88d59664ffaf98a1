from __future__ import annotations

import pytest

from app.core.config import settings
from app.services.suite import CRITERIA, run_suite


@pytest.mark.parametrize("name, check", CRITERIA, ids=[name for name, _ in CRITERIA])
def test_criterion(name, check):
    passed, details = check(0, settings.TOL)
    assert passed, details


@pytest.mark.slow
def test_full_suite_is_deterministic():
    first = run_suite(seed=0)
    assert first.passed
    assert [c.number for c in first.criteria] == list(range(1, 10))
    assert run_suite(seed=0).model_dump() == first.model_dump()
