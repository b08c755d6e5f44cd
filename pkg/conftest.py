"""Shared pytest fixtures; puts the repo root on sys.path for the flat packages."""

import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(20240611))


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    """Keep a developer's .env or shell settings out of the tests."""
    for name in ("QCPU_TOLERANCE", "QCPU_MAX_DENSE_DIM", "LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)
