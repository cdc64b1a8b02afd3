import numpy as np
import pytest

from optholo.coords import ParameterPoint


@pytest.fixture
def rng():
    return np.random.default_rng(7)


def point(xi, zeta):
    return ParameterPoint(tuple(np.atleast_1d(xi).astype(complex)), tuple(np.atleast_1d(zeta).astype(complex)))
