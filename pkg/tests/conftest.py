import numpy as np
import pytest

from torusflow.spectral import PhysicalGrid


@pytest.fixture
def grid32() -> PhysicalGrid:
    return PhysicalGrid(32)


@pytest.fixture
def grid16() -> PhysicalGrid:
    return PhysicalGrid(16)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)
