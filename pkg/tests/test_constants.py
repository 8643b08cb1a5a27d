import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spnehari import constants as K
from spnehari.errors import ConfigError

SQ3 = math.sqrt(3.0)


def test_a_of_p():
    assert K.a_of_p(2.0) == 0.5
    assert K.a_of_p(2.5) == 0.5
    assert K.a_of_p(1.5) == pytest.approx(0.5625, rel=1e-15)


def test_lambda0_closed_forms():
    assert K.lambda0(2.0, 1.0, 1.0) == pytest.approx(3 * SQ3 * math.pi / 64, rel=1e-14)
    assert K.lambda0_bar(2.0, 1.0, 1.0) == pytest.approx(3 * SQ3 * math.pi / 32, rel=1e-14)
    assert K.lambda0_bar(2.5, 1.0, 2.0) == math.inf
    assert K.lambda0_bar(K.P_CRIT, 1.0, 2.0) == math.inf
    with pytest.raises(ConfigError):
        K.lambda0_bar(1.8, 1.0, 1.0)


@given(st.floats(1.05, 2.95), st.floats(0.1, 10), st.floats(0.5, 4))
def test_lambda0_homogeneity_and_sign(p, lam, S):
    L = K.lambda0(p, lam, S)
    assert L > 0
    assert K.lambda0(p, 4 * lam, S) == pytest.approx(8 * L, rel=1e-12)
    assert K.d0_level(p, S) > 0


@pytest.mark.parametrize("S", [1.0, 2.5295])
def test_lambda0_bar_dominates(S):
    for p in (2.0, 2.05, 2.1, 2.15, 2.18):
        assert K.lambda0_bar(p, 1.0, S) > K.lambda0(p, 1.0, S)


def test_lemma21():
    b = K.lemma21_bundle(1.5, 1.0, K.lemma21_bundle(1.5, 1.0, 1.0).d_lambda)
    assert b.d_lambda == pytest.approx(2.0, abs=1e-14)
    assert b.s0 == pytest.approx(0.5, abs=1e-14)
    assert abs(b.f_at_s0) <= 1e-14
    s = np.geomspace(1e-6, 1e6, 10001)
    assert np.all(K.f_d(s, 1.5, 1.0, 2.5) > 0)
    half = K.lemma21_bundle(1.5, 1.0, 1.0)
    assert half.eta < half.s0 < half.xi
    inner = np.linspace(half.eta, half.xi, 1003)[1:-1]
    assert np.all(K.f_d(inner, 1.5, 1.0, 1.0) < 0)
    assert abs(K.f_d(half.eta, 1.5, 1.0, 1.0)) < 1e-12
    assert abs(K.f_d(half.xi, 1.5, 1.0, 1.0)) < 1e-12


def test_coupling_quadratic():
    assert K.s_min_and_g(1, 1, 1) == (0.5, 0.0)
    s, g = K.s_min_and_g(1, 2, 1)
    assert s == pytest.approx(0.6, abs=1e-15) and g == pytest.approx(0.2, abs=1e-15)
    grid = np.linspace(0, 1, 1001)
    assert np.all(K.coupling_quadratic(grid, 1, 2, 1) >= g - 1e-15)


@given(st.floats(0.01, 10), st.floats(0.01, 10), st.floats(0.01, 10))
def test_gmin_below_diagonal(m11, m22, m12):
    _, g = K.s_min_and_g(m11, m22, m12)
    assert g < min(m11, m22)


def test_nonexist_threshold():
    assert K.nonexist_threshold(2.0, 1.0) == 4.0
    assert K.nonexist_threshold(2.0, 7.0) == 4.0
    assert K.nonexist_threshold(1.5, 1.0) == pytest.approx(1.0, rel=1e-14)
    lams = [0.5, 1.0, 2.0, 4.0]
    vals = [K.nonexist_threshold(1.5, lam) for lam in lams]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert K.nonexist_ratio(10, 10, 1) == pytest.approx(99 / 20)


def test_sobolev_against_shooting_oracle(oracles):
    for row in oracles["nls"]:
        S = K.sobolev_constant(row["p"], row["lam"])
        assert S == pytest.approx(row["sobolev"], rel=1e-4)


def test_sobolev_scaling_law(oracles):
    by = {(r["p"], r["lam"]): r["sobolev"] for r in oracles["nls"]}
    k = K.sobolev_scaling_exponent(2.0)
    assert by[(2.0, 2.0)] / by[(2.0, 1.0)] == pytest.approx(2.0**k, rel=1e-7)
    assert K.sobolev_constant(2.0, 2.0) / K.sobolev_constant(2.0, 1.0) == pytest.approx(2.0**k, rel=1e-4)


def test_sobolev_grid_convergence():
    a = K.sobolev_constant(2.2, 1.0, r_max=40.0, n=2000)
    b = K.sobolev_constant(2.2, 1.0, r_max=40.0, n=4000)
    assert abs(a - b) < 1e-3 * b


def test_sobolev_override_and_determinism():
    assert K.sobolev_constant(2.0, 1.0, override=1.2345678901234567) == 1.2345678901234567
    assert K.sobolev_constant(2.5, 1.0) == K.sobolev_constant(2.5, 1.0)
    b1 = K.bundle(2.2, 1.0, 2.5, (0.1, 0.2, 0.05)).as_dict()
    b2 = K.bundle(2.2, 1.0, 2.5, (0.1, 0.2, 0.05)).as_dict()
    assert b1 == b2


def test_norm_threshold_and_hartree_bound():
    p, lam, mu = 1.5, 1.0, 0.01
    want = math.sqrt(3 * SQ3 * 0.5 * math.pi / (16 * mu * 1.5))
    assert K.norm_threshold(p, lam, mu) == pytest.approx(want, rel=1e-14)
    assert K.hartree_bound(1.0) == pytest.approx(16 / (3 * SQ3 * math.pi), rel=1e-15)
