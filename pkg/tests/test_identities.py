import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spnehari.errors import InconsistentZ
from spnehari.functional import PairFn, Params
from spnehari.identities import (
    CoeffDecomp,
    GroundStateStatus,
    ZVector,
    basis,
    c1_value,
    check_ground_state_condition,
    check_identities,
    decompose,
    identity_report,
    reconstruct,
    z_vector,
)
from spnehari.radial_grid import make_grid

from conftest import smooth_profile

UNIT = Params(1.0, 2.5, 1.0, 1.0, 1.0)


def test_zero_state(small_grid):
    z = z_vector(PairFn.zeros(small_grid), UNIT)
    assert z.as_array().tolist() == [0.0] * 6
    assert check_identities(z, UNIT) == (0.0, 0.0)


def test_semitrivial_zeros(small_grid):
    rng = np.random.default_rng(0)
    u = smooth_profile(rng, small_grid.nodes)
    z = z_vector(PairFn.from_arrays(small_grid, u, 0 * u), UNIT)
    assert z.z4 == 0.0 and z.z5 == 0.0


def test_synthetic_round_trip():
    z = ZVector(1, 3, 1, 1, 3, 0)
    assert check_identities(z, UNIT) == (0.0, 0.0)
    dec = decompose(z, UNIT)
    assert (dec.theta, dec.s, dec.t, dec.w) == (1.0, 1.0, 1.0, 0.0)
    assert reconstruct(dec, UNIT) == z


@given(st.floats(0.1, 5), st.floats(0.1, 5), st.floats(0.1, 5), st.floats(0.0, 5),
       st.floats(1.05, 2.95), st.floats(0.05, 3), st.floats(0.05, 3), st.floats(0.05, 3))
def test_basis_solves_identities(th, s, t, w, p, m11, m22, m12):
    prm = Params(1.0, p, m11, m22, m12)
    z = ZVector.from_array(basis(prm) @ [th, s, t, w])
    neh, poh = check_identities(z, prm)
    scale = max(abs(x) for x in z.as_array()) / max(z.z1 + z.z2, 1e-300)
    assert neh < 1e-12 * max(scale, 1) and poh < 1e-12 * max(scale, 1)
    assert z.energy(prm) == pytest.approx(th, rel=1e-10, abs=1e-10 * scale)
    dec = decompose(z, prm)
    np.testing.assert_allclose([dec.theta, dec.s, dec.t, dec.w], [th, s, t, w],
                               rtol=1e-8, atol=1e-8 * max(th, s, t, w))
    # c1 in coefficient form
    assert c1_value(z, prm) == pytest.approx(-8 * th + (p - 1) * (3 - p) * w,
                                             rel=1e-9, abs=1e-9 * max(th, w))


def test_inconsistent_z_raises():
    with pytest.raises(InconsistentZ):
        decompose(ZVector(1, 3, 1, 1, 3, 0.5), UNIT)
    rep = identity_report(ZVector(1, 3, 1, 1, 3, 0.5), UNIT)
    assert rep.theta is None and rep.nehari_residual > 0


def test_ground_state_condition():
    prm = Params(1.0, 2.5, 1.0, 1.0, 1.0)
    good = ZVector.from_array(basis(prm) @ [1.0, 0.5, 0.5, 1.0])
    chk = check_ground_state_condition(good, prm)
    assert chk.status == GroundStateStatus.IN_M_MINUS and chk.w_below_c1_bound
    bound = 8.0 / ((prm.p - 1) * (3 - prm.p))
    bad = ZVector.from_array(basis(prm) @ [1.0, 0.5, 0.5, 1.2 * bound])
    chk = check_ground_state_condition(bad, prm)
    assert chk.status == GroundStateStatus.VIOLATED and not chk.w_below_c1_bound


@given(st.integers(0, 2**32 - 1), st.floats(0.2, 5.0))
def test_constraint_on_random_pairs(seed, lam):
    g = make_grid(20.0, 300)
    rng = np.random.default_rng(seed)
    pair = PairFn.from_arrays(g, smooth_profile(rng, g.nodes), smooth_profile(rng, g.nodes))
    z = z_vector(pair, Params(lam, 2.0, 1.0, 1.0, 1.0))
    assert z.constraint_gap(lam) >= 0


def test_report_json():
    rep = identity_report(ZVector(1, 3, 1, 1, 3, 0), UNIT)
    assert '"nehari_residual": 0.0' in rep.to_json()
