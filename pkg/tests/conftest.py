import pytest

from polytunnel.dispersion import compute_dispersion
from polytunnel.units import validate_params

from grids import EXPERIMENT, acceptance_grid


@pytest.fixture
def ref_params():
    return validate_params({**EXPERIMENT, "N": 10})


@pytest.fixture
def ref_dispersion(ref_params):
    return compute_dispersion(ref_params)


@pytest.fixture(scope="session")
def grid_points():
    return [validate_params(raw) for raw in acceptance_grid()]
