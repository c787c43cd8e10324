import os
import sys

import pytest

# Add the project directory to the sys.path
project_home = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if project_home not in sys.path:
    sys.path.insert(0, project_home)

from analytic_core import AnalyticFunction, BoundaryGrid  # noqa: E402
from conformal import StarLikeDomain, make_polynomial_map, theodorsen_solve  # noqa: E402
from semiflow import bp_generator, dilation, parabolic, rotation  # noqa: E402


@pytest.fixture(scope='session')
def grid():
    return BoundaryGrid(256)


@pytest.fixture(scope='session')
def small_grid():
    return BoundaryGrid(64)


@pytest.fixture(scope='session')
def zoo():
    """Disk generators -z, iz, (z-1)^2 and -z(1+z)"""
    shifted = AnalyticFunction.constant(1.0).plus(AnalyticFunction.identity())
    return {
        'dilation': dilation(),
        'rotation': rotation(),
        'parabolic': parabolic(),
        'bp_shifted': bp_generator(shifted, 0.0),
    }


@pytest.fixture(scope='session')
def polynomial_map(grid):
    """k^-1(w) = w + 0.3 w^2"""
    return make_polynomial_map([0.3], grid)


@pytest.fixture(scope='session')
def limacon_map(grid):
    """rho(theta) = 1 + 0.2 cos(theta) by Theodorsen's iteration"""
    return theodorsen_solve(StarLikeDomain.limacon(0.2), grid)
