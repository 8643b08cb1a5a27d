"""Theta-averaged nonlinearity of the coupled system.

For real ``a, b`` the average ``(1/2pi) int |a + e^{i theta} b|^{p+1} d theta``
equals ``(1/2pi) int (a^2 + 2ab cos theta + b^2)^{(p+1)/2} d theta``. Its
partial derivatives divided by ``p+1`` are the right-hand sides of the two
equations. Averages use the ``m``-node periodic trapezoid rule, which is
spectrally accurate away from ``|a| = |b|``; there the integrand has a
``|theta - pi|^{p+1}`` cusp and the scalar entry points double ``m`` until
successive values agree.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ConfigError

__all__ = [
    "ThetaQuadrature",
    "theta_avg_power",
    "theta_avg_force",
    "jensen_factor",
    "theta_fields",
]

DEFAULT_M = 128
_M_CAP = 1 << 16
_REFINE_TOL = 1e-10


@dataclass(frozen=True)
class ThetaQuadrature:
    m: int = DEFAULT_M

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 16 or self.m % 2:
            raise ConfigError(f"theta node count must be even and >= 16, got {self.m!r}")


def theta_fields(a, b, p, m=DEFAULT_M):
    """Vectorized ``(P, Fa, Fb)`` at fixed ``m``; see :mod:`spnehari.kernels`."""
    return kernels.theta_fields(a, b, float(p), int(m))


def _refined(fn, m, fixed):
    prev = fn(m)
    if fixed:
        return prev
    while m < _M_CAP:
        m *= 2
        cur = fn(m)
        if np.max(np.abs(np.subtract(cur, prev))) <= _REFINE_TOL * max(1.0, np.max(np.abs(cur))):
            return cur
        prev = cur
    return prev


def theta_avg_power(a: float, b: float, p: float, m: int | None = None) -> float:
    """``(1/2pi) int (a^2 + 2ab cos t + b^2)^{(p+1)/2} dt``.

    With ``m`` given the rule is applied once at that size; otherwise the
    default size is doubled until converged.
    """
    fixed = m is not None
    m0 = ThetaQuadrature(m if fixed else DEFAULT_M).m
    aa, bb = np.array([float(a)]), np.array([float(b)])
    return float(_refined(lambda k: kernels.theta_power(aa, bb, float(p), k)[0], m0, fixed))


def theta_avg_force(a: float, b: float, p: float, m: int | None = None):
    """Force pair; each entry is ``1/(p+1)`` times a partial of :func:`theta_avg_power`."""
    fixed = m is not None
    m0 = ThetaQuadrature(m if fixed else DEFAULT_M).m
    aa, bb = np.array([float(a)]), np.array([float(b)])

    def one(k):
        _, fa, fb = kernels.theta_fields(aa, bb, float(p), k)
        return np.array([fa[0], fb[0]])

    fa, fb = _refined(one, m0, fixed)
    return float(fa), float(fb)


def jensen_factor(s: float, p: float, m: int | None = None) -> float:
    """Average of ``(1 + 2 sqrt(s(1-s)) cos t)^{(p+1)/2}``, the mixing gain of a split state."""
    if not 0.0 < s < 1.0:
        raise ConfigError(f"mixing fraction must lie in (0, 1), got {s!r}")
    return theta_avg_power(np.sqrt(s), np.sqrt(1.0 - s), p, m)
