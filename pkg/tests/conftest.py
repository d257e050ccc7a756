import numpy as np
import pytest

from tunnelwell.geometry import WellGeometry, natural_constants


@pytest.fixture(scope="session")
def constants():
    return natural_constants()


@pytest.fixture(scope="session")
def box360():
    """The default well: half-width 35, barrier width 3, height 360."""
    return WellGeometry.symmetric(35.0, 3.0, 360.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20260816)
