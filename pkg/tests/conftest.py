import numpy as np
import pytest

from povmqfi.instances import counterexample_state
from povmqfi.states import DensityMatrix, computational_basis, validate_povm

PLUS = np.array([1.0, 1.0]) / np.sqrt(2)
MINUS = np.array([1.0, -1.0]) / np.sqrt(2)


@pytest.fixture
def plus_state():
    return DensityMatrix.pure(PLUS)


@pytest.fixture
def qubit_basis():
    return computational_basis(2)


@pytest.fixture
def noisy_povm():
    return validate_povm([np.eye(2) / 2, np.eye(2) / 2])


@pytest.fixture
def counterexample():
    return counterexample_state()


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)
