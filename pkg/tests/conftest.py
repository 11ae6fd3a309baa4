import numpy as np
import pytest

from sipsticky.jump_kernel import PRESETS


@pytest.fixture
def nn_kernel():
    return PRESETS["nn"]


@pytest.fixture
def range2_kernel():
    return PRESETS["range2"]


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
