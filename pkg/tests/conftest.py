import numpy as np
import pytest

from bjorling.curves import (
    EpitrochoidParams,
    make_circle,
    make_cycloid,
    make_epitrochoid,
    make_parabola,
)

# canonical epitrochoid test parameters, lambda chosen away from 1/(k+1)
EPI_PARAMS = {1: 0.6, 2: 0.5, 3: 0.6, 4: 0.4}


def epi(k, lam=None):
    return make_epitrochoid(EpitrochoidParams(k=k, lam=EPI_PARAMS[k] if lam is None else lam))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture(params=["circle", "cycloid", "parabola", "epi1", "epi2", "epi3", "epi4"])
def test_curve(request):
    name = request.param
    if name == "circle":
        return make_circle()
    if name == "cycloid":
        return make_cycloid()
    if name == "parabola":
        return make_parabola()
    return epi(int(name[-1]))
