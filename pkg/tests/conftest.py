import numpy as np
import pytest

from kfunc.grid import Grid


@pytest.fixture
def grid():
    return Grid(200)


@pytest.fixture
def affine(grid):
    """rho = x + 1/2 on [0, 1]: unit norm, so it lies on the number constraint with K = 1."""
    return grid.from_function(lambda x: x + 0.5)


@pytest.fixture
def sine(grid):
    return grid.from_function(lambda x: np.sin(2 * np.pi * x))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
