import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20091101)


def rotation(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])
