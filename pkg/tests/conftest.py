import warnings

import numpy as np
import pytest

from kerrwg.core import TwoPhotonPacket, ValidityWarning, make_params
from kerrwg.ode_oracle import DEFAULT_ORACLE, integrate_two

ORACLE_EPS = 0.1


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def oracle_runs():
    """Two-photon integrations at the default oracle scale, shared by all tests.

    Keys are the Kerr strength; each run takes a few minutes.
    """
    cache = {}

    def get(u):
        if u not in cache:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", ValidityWarning)
                cache[u] = integrate_two(TwoPhotonPacket(0.0, 0.0, ORACLE_EPS), DEFAULT_ORACLE,
                                         make_params(1.0, u))
        return cache[u]

    return get
