import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20260824)


def random_gray(rng, shape, high=256):
    return rng.integers(0, high, size=shape, dtype=np.uint8)
