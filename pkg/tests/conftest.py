import numpy as np
import pytest

from peskine_lab.rng import Rng


@pytest.fixture
def rng():
    return Rng(0xFEED)


def assert_mats_equal(a, b):
    assert np.array_equal(np.asarray(a), np.asarray(b)), f"{a!r} != {b!r}"
