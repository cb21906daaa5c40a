import numpy as np
import pytest

from stablemaps import PRESET_NAME, solve_partition_function


@pytest.fixture(scope="session")
def table256():
    """Preset model solved once for the whole suite."""
    return solve_partition_function(PRESET_NAME, L_max=256, tol=1e-10)


@pytest.fixture()
def rng():
    return np.random.default_rng(20260826)
