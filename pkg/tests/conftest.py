import numpy as np
import pytest

from qharper import ModelParams
from qharper.qspace import QuantumSpace


@pytest.fixture
def fig_mixed_params():
    """Mixed regular/chaotic benchmark model."""
    return ModelParams(1.5, 0.5, 0.05, 0.05)


@pytest.fixture
def unperturbed_params():
    return ModelParams(1.5, 0.5)


@pytest.fixture
def single_separatrix_params():
    """a = eps model with one separatrix energy (= 2)."""
    return ModelParams(2.0, 2.0, 0.05, 0.05)


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def space(n):
    return QuantumSpace(n)
