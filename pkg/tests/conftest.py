import numpy as np
import pytest

from fpkit import DiffusionMatrixField, GridSpec, linear_drift


@pytest.fixture(scope="session")
def ou_1d():
    """Unit diffusion with b(x) = -x: the stationary density is N(0, 1)."""
    A = DiffusionMatrixField.from_constant(np.eye(1), 1.0)
    return A, linear_drift(1, 1.0)


@pytest.fixture(scope="session")
def ou_2d():
    A = DiffusionMatrixField.from_constant(np.eye(2), 1.0)
    return A, linear_drift(2, 1.0)


@pytest.fixture(scope="session")
def grid_1d():
    return GridSpec(1, 8.0, 512)
