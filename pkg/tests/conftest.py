import numpy as np
import pytest

from nullgauge.grid import GridSpec, PhysicalConstants


@pytest.fixture
def consts():
    return PhysicalConstants(1.0, 1.0)


@pytest.fixture
def grid():
    return GridSpec(256, 0.1, 0.02)


@pytest.fixture
def rng():
    return np.random.default_rng(2024)
