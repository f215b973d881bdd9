import numpy as np
import pytest

from solitonlab.core.grid import make_grid
from solitonlab.schemas.params import ModelParams
from solitonlab.services.ground_state import solve_ground_state


@pytest.fixture(scope="session")
def params():
    return ModelParams()


@pytest.fixture(scope="session")
def grid1d():
    return make_grid(1, 512, 40.0)


@pytest.fixture(scope="session")
def grid2d():
    return make_grid(2, 64, 24.0)


@pytest.fixture(scope="session")
def ground1d(grid1d, params):
    return solve_ground_state(1.0, grid1d, params)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


CONFIG_1D = """
[model]
p = 1.2
r = 1.6
theta = 0.1
eps = 0.2

[grid]
dim = 1
points_per_axis = 512
box_length = 40

[sigma0]
a_bar = -0.5
v_bar = 1.0
mu = 1.0

[scenario]
dt = 0.01
horizon = fixed
t_end = 1.0
decompose_stride = 10
with_potential = false

[output]
use_cache = false
"""


@pytest.fixture
def config_text():
    return CONFIG_1D
