import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)


def close(a, b, tol):
    return np.max(np.abs(np.asarray(a) - np.asarray(b))) <= tol
