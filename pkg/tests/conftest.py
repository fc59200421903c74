import pytest

from valleyjump import LandscapeParams


@pytest.fixture
def params():
    return LandscapeParams()


@pytest.fixture
def unit_params():
    """f0 = x0 = 1, x1 = 0.8 with unit bend scales."""
    return LandscapeParams(x1=0.8, x2=0.4, x0=1.0, f0=1.0, y_b=1.0, y_f=1.0, L_d=0.1, y_d=1.0)
