import pytest

from effsphere import harness
from effsphere.mie import PhysicalParams


@pytest.fixture(scope="session")
def default_params():
    return PhysicalParams()


@pytest.fixture(scope="session")
def default_sweep(default_params):
    """The 26-point default sweep, computed once for the whole session."""
    return harness.sweep(default_params, harness.DEFAULT_EPS_GRID)
