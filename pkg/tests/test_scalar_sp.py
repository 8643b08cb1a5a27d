import math

import numpy as np
import pytest

from spnehari import constants as K
from spnehari.errors import BranchUnavailable, ConfigError
from spnehari.functional import Params
from spnehari.radial_grid import make_grid
from spnehari.scalar_sp import NehariClass, ground_state_nls, solve_scalar

PRM15 = Params(1.0, 1.5, 1.0, 1.0, 1.0)


@pytest.fixture(scope="module")
def mu15():
    return 0.5 * K.lambda0(1.5, 1.0, K.sobolev_constant(1.5, 1.0))


def test_nls_ground_state(oracles):
    row = next(r for r in oracles["nls"] if r["p"] == 2.0 and r["lam"] == 1.0)
    q = ground_state_nls(2.0, 1.0)
    assert q.norm_sq == pytest.approx(row["A"], rel=2e-4)
    assert q.w.values[0] == pytest.approx(row["q0"], rel=1e-3)
    assert np.all(q.w.values[:-1] > 0)


def test_minus_branch_properties(mu15):
    res = solve_scalar(PRM15, mu15, "MINUS")
    assert res.energy > 0
    assert res.nehari_class == NehariClass.N_MINUS
    assert res.nehari_residual < 1e-8
    assert res.h1_norm < K.norm_threshold(1.5, 1.0, mu15)
    S = K.sobolev_constant(1.5, 1.0)
    assert res.energy < K.d0_level(1.5, S)
    assert np.all(res.w.values >= 0)


def test_plus_branch(mu15):
    res = solve_scalar(PRM15, mu15, "PLUS")
    assert res.energy < 0
    assert res.nehari_class == NehariClass.N_PLUS
    assert res.nehari_residual < 1e-8


def test_energy_monotone_in_mu():
    prm = Params(1.0, 2.5, 1, 1, 1)
    grid = make_grid(40.0, 2000)
    es = [solve_scalar(prm, mu, "MINUS", grid).energy for mu in (0.01, 0.03, 0.09)]
    assert es[0] <= es[1] <= es[2]


def test_branch_errors():
    with pytest.raises(BranchUnavailable):
        solve_scalar(Params(1.0, 2.5, 1, 1, 1), 0.05, "PLUS")
    with pytest.raises(ConfigError):
        solve_scalar(PRM15, 0.01, "SIDEWAYS")
    with pytest.raises(ConfigError):
        solve_scalar(PRM15, -1.0, "MINUS")
