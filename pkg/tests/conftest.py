from __future__ import annotations

import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings as hypothesis_settings

from app.fixtures import load_fixture

hypothesis_settings.register_profile("default", max_examples=40, deadline=None)
hypothesis_settings.register_profile(
    "ci", max_examples=150, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
hypothesis_settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def standard():
    return load_fixture("standard")


@pytest.fixture
def kropina_point():
    return load_fixture("kropina")


@pytest.fixture
def berwald_point():
    return load_fixture("berwald")


@pytest.fixture
def landsberg_point():
    return load_fixture("landsberg")


@pytest.fixture
def skewed():
    return load_fixture("skewed")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def sample_y():
    return np.array([1.0, 0.3, 0.2])
