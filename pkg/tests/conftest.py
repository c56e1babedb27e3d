import numpy as np
import pytest

from econv import _kernels
from econv.conjugate import EvalContext
from econv.extreal import TolerancePolicy
from econv.repro import (
    entropy_dc_problem,
    entropy_model,
    linear_on_halfline,
    open_halfplane_indicator,
    quadratic_on_halfline,
)


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Absorb JIT compilation so timed assertions see steady state."""
    pts = np.linspace(0.0, 1.0, 8)[:, None]
    fv = pts[:, 0] ** 2
    _kernels.coupling_sup(pts, fv, np.ones(1), np.zeros(1), 1.0, 0.0)
    _kernels.wgrid_sup(pts, pts, fv, fv, np.zeros(1), 0.0)
    _kernels.wgrid_sup_many(pts, pts, fv, fv, pts, 0.0)
    _kernels.dc_grid_min(fv, fv)


@pytest.fixture
def exact_ctx():
    return EvalContext.exact()


@pytest.fixture
def grid_policy():
    return TolerancePolicy.grid(eq_tol=1e-6)


@pytest.fixture
def quad_halfline():
    return quadratic_on_halfline()


@pytest.fixture
def linear_halfline():
    return linear_on_halfline()


@pytest.fixture
def entropy():
    return entropy_model()


@pytest.fixture
def halfplane_indicator():
    return open_halfplane_indicator()


@pytest.fixture
def entropy_dc():
    return entropy_dc_problem()
