import numpy as np
import pytest

from mnbp.decoder.kernels import BACKENDS


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=sorted(BACKENDS))
def backend(request):
    return request.param
