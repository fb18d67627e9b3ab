import numpy as np
import pytest

from sparsepriv.gf import get_field


@pytest.fixture
def rng():
    return np.random.default_rng(20240531)


@pytest.fixture(params=[2, 3, 7, 256], ids=lambda q: f"GF{q}")
def field(request):
    return get_field(request.param)

