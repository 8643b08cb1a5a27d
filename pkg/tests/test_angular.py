import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spnehari.angular import jensen_factor, theta_avg_force, theta_avg_power
from spnehari.errors import ConfigError


def test_closed_forms():
    assert theta_avg_power(1, 1, 3, m=64) == pytest.approx(6.0, abs=1e-12)
    assert jensen_factor(0.5, 3, m=64) == pytest.approx(1.5, abs=1e-12)
    assert theta_avg_force(1, 1, 3, m=64) == pytest.approx((3.0, 3.0), abs=1e-12)
    assert theta_avg_power(0, 0, 2.0) == 0.0
    assert theta_avg_force(0, 0, 2.0) == (0.0, 0.0)
    assert theta_avg_force(1, 0, 1.7) == pytest.approx((1.0, 0.0), abs=1e-14)
    assert theta_avg_power(1.7, 0, 2.3) == pytest.approx(1.7**3.3, rel=1e-14)


def test_against_quadrature_oracle(oracles):
    for row in oracles["theta"]:
        a, b, p = row["a"], row["b"], row["p"]
        assert theta_avg_power(a, b, p) == pytest.approx(row["P"], rel=1e-9)
        fa, fb = theta_avg_force(a, b, p)
        assert fa == pytest.approx(row["Fa"], rel=1e-8, abs=1e-12)
        assert fb == pytest.approx(row["Fb"], rel=1e-8, abs=1e-12)


def test_jensen_limits():
    assert jensen_factor(1e-12, 2.0) == pytest.approx(1.0, abs=1e-5)
    for s in np.linspace(0.05, 0.95, 10):
        assert jensen_factor(s, 1.5) > 1.0
    with pytest.raises(ConfigError):
        jensen_factor(1.0, 2.0)


@given(st.floats(0.0, 3.0), st.floats(0.0, 3.0), st.floats(1.01, 2.99))
def test_triangle_bound(a, b, p):
    P = theta_avg_power(a, b, p)
    assert P <= (a + b) ** (p + 1) * (1 + 1e-12) + 1e-300
    assert (a + b) ** (p + 1) <= 2**p * (a ** (p + 1) + b ** (p + 1)) * (1 + 1e-12) + 1e-300


@given(st.floats(0.2, 2.0), st.floats(0.2, 2.0), st.floats(1.05, 2.95))
def test_derivative_consistency(a, b, p):
    if abs(a - b) < 0.05:
        b = a + 0.1  # keep away from the cusp for finite differences
    eps = 1e-5 * a
    fd = (theta_avg_power(a + eps, b, p) - theta_avg_power(a - eps, b, p)) / (2 * eps)
    fa, fb = theta_avg_force(a, b, p)
    assert fd == pytest.approx((p + 1) * fa, rel=1e-6)
    epsb = 1e-5 * b
    fdb = (theta_avg_power(a, b + epsb, p) - theta_avg_power(a, b - epsb, p)) / (2 * epsb)
    assert fdb == pytest.approx((p + 1) * fb, rel=1e-6)


def test_integer_exponent_agrees():
    # p = 3 integrand is a trigonometric polynomial: any m >= 16 is exact
    for a, b in [(0.3, 1.2), (2.0, 0.5)]:
        exact = (a * a + b * b) ** 2 + 2 * (a * b) ** 2
        assert theta_avg_power(a, b, 3.0) == pytest.approx(exact, rel=1e-12)
