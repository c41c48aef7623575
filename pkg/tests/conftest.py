import numpy as np
import pytest

from gasfeeg import nn


@pytest.fixture(autouse=True)
def float64_default():
    nn.set_dtype("float64")
    yield
    nn.set_dtype("float64")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
