import numpy as np
import pytest

from gpvortex.grids import annulus_grid, disc_grid
from gpvortex.profile1d import ProfileOptions, minimize_profile, optimize_phase
from gpvortex.regime import make_regime


def observed_order(errors):
    """Mean dyadic convergence order of a sequence of errors under doubling."""
    e = np.asarray(errors, dtype=float)
    return float(np.mean(np.log2(e[:-1] / e[1:])))


@pytest.fixture(scope="session")
def reg_005_030():
    return make_regime(0.05, 0.30)


@pytest.fixture(scope="session")
def reg_005_035():
    return make_regime(0.05, 0.35)


@pytest.fixture(scope="session")
def reg_002_025():
    return make_regime(0.02, 0.25)


@pytest.fixture(scope="session")
def annulus_profile_005_030(reg_005_030):
    """omega_0-optimal annulus profile at (0.05, 0.30)."""
    om0, prof, table = optimize_phase(reg_005_030, annulus_grid(reg_005_030, 1025))
    return om0, prof, table


@pytest.fixture(scope="session")
def disc_profile_005_035(reg_005_035):
    return minimize_profile(reg_005_035, 8, disc_grid(513),
                            opts=ProfileOptions(tol=1e-11, max_iters=2000))


@pytest.fixture(scope="session")
def annulus_profile_002_025(reg_002_025):
    return minimize_profile(reg_002_025, 19, annulus_grid(reg_002_025, 1025))
