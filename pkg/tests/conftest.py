import numpy as np
import pytest

from dsssync.dsscore import make_single_parity


@pytest.fixture
def parity32():
    return make_single_parity(2, 5)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
