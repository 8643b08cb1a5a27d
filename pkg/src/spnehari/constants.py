"""Closed-form thresholds and constants of the existence theory.

``S`` below is the embedding constant ``S_{p+1}`` of
``S ||u||_{L^{p+1}} <= ||u||_{H^1}`` with ``||u||_{H^1}^2 = int |grad u|^2 +
lambda u^2``. Every threshold consumes it only through
``(2 S^{p+1} / (3 - p))^{2/(p-1)}``; it can be computed numerically with
:func:`sobolev_constant` or supplied by the caller.
"""
from __future__ import annotations

import math
import threading
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import ConfigError

__all__ = [
    "P_CRIT",
    "ConstantsBundle",
    "a_of_p",
    "lambda0",
    "lambda0_bar",
    "d0_level",
    "norm_threshold",
    "hartree_bound",
    "lemma21_bundle",
    "Lemma21",
    "f_d",
    "s_min_and_g",
    "coupling_quadratic",
    "nonexist_threshold",
    "nonexist_ratio",
    "sobolev_constant",
    "sobolev_scaling_exponent",
    "bundle",
]

# Above this exponent the ground-state threshold is infinite.
P_CRIT = (math.sqrt(73.0) - 2.0) / 3.0
_SQRT3 = math.sqrt(3.0)


def _check_p(p, lo=1.0, hi=3.0, closed_hi=False):
    ok = lo < p <= hi if closed_hi else lo < p < hi
    if not ok:
        bracket = "]" if closed_hi else ")"
        raise ConfigError(f"p={p!r} outside ({lo}, {hi}{bracket}")


def _check_pos(**kw):
    for k, v in kw.items():
        if not v > 0:
            raise ConfigError(f"{k} must be positive, got {v!r}")


def a_of_p(p: float) -> float:
    _check_p(p)
    if p <= 2.0:
        return ((3.0 - p) / 2.0) ** (1.0 / (p - 1.0))
    return 0.5


def _sobolev_factor(p, S):
    """``((3 - p) / (2 S^{p+1}))^{2/(p-1)}``."""
    return ((3.0 - p) / (2.0 * S ** (p + 1.0))) ** (2.0 / (p - 1.0))


def lambda0(p: float, lam: float, S: float) -> float:
    """Upper bound on ``mu11`` for the positive-energy solution."""
    _check_p(p)
    _check_pos(lam=lam, S=S)
    pre = 3.0 * _SQRT3 * (p - 1.0) * math.pi * lam**1.5 / (32.0 * (3.0 - p) * a_of_p(p))
    return pre * _sobolev_factor(p, S)


def lambda0_bar(p: float, lam: float, S: float) -> float:
    """Ground-state threshold for ``2 <= p < 3``; ``inf`` from ``P_CRIT`` on."""
    if not 2.0 <= p < 3.0:
        raise ConfigError(f"p={p!r} outside [2, 3)")
    _check_pos(lam=lam, S=S)
    if p >= P_CRIT:
        return math.inf
    pre = (3.0 * _SQRT3 * (p + 1.0) ** 2 * math.sqrt(p - 1.0) * math.pi * lam**1.5
           / (8.0 * (5.0 - p) ** 2 * math.sqrt(3.0 - p)))
    return pre * _sobolev_factor(p, S)


def d0_level(p: float, S: float) -> float:
    """Energy level ``D0`` bounding the sublevel set split by the norm threshold."""
    _check_p(p)
    _check_pos(S=S)
    return (a_of_p(p) * (p - 1.0) / (2.0 * (p + 1.0))
            * (2.0 * S ** (p + 1.0) / (3.0 - p)) ** (2.0 / (p - 1.0)))


def norm_threshold(p: float, lam: float, mu: float) -> float:
    """``(3 sqrt3 (p-1) pi lam^{3/2} / (16 mu (3-p)))^{1/2}``."""
    _check_p(p)
    _check_pos(lam=lam, mu=mu)
    return math.sqrt(3.0 * _SQRT3 * (p - 1.0) * math.pi * lam**1.5 / (16.0 * mu * (3.0 - p)))


def hartree_bound(lam: float) -> float:
    """Constant ``16 / (3 sqrt3 pi lam^{3/2})`` of the Coulomb energy estimate."""
    _check_pos(lam=lam)
    return 16.0 / (3.0 * _SQRT3 * math.pi * lam**1.5)


# -- f_d(s) = lambda - 2^p s^{p-1} + d s -----------------------------------

def f_d(s, p: float, lam: float, d: float):
    s = np.asarray(s, dtype=float)
    return lam - 2.0**p * s ** (p - 1.0) + d * s


@dataclass(frozen=True)
class Lemma21:
    d_lambda: float
    s0: float
    f_at_s0: float
    eta: float | None
    xi: float | None


def _d_lambda(p, lam):
    return (p - 1.0) * (2.0**p * (2.0 - p) ** (2.0 - p) / lam ** (2.0 - p)) ** (1.0 / (p - 1.0))


def lemma21_bundle(p: float, lam: float, d: float) -> Lemma21:
    """Critical slope ``d_lambda``, the stationary point ``s0(d)`` and the negativity interval.

    ``eta`` and ``xi`` are the zeros of ``f_d`` around ``s0(d)`` when
    ``d < d_lambda``; otherwise they are ``None``.
    """
    if not 1.0 < p < 2.0:
        raise ConfigError(f"p={p!r} outside (1, 2)")
    _check_pos(lam=lam, d=d)
    d_lam = _d_lambda(p, lam)
    s0 = (2.0**p * (p - 1.0) / d) ** (1.0 / (2.0 - p))
    f0 = float(f_d(s0, p, lam, d))
    eta = xi = None
    if f0 < 0:
        fn = lambda s: float(f_d(s, p, lam, d))
        lo = s0
        while fn(lo) < 0:
            lo *= 0.5
        hi = s0
        while fn(hi) < 0:
            hi *= 2.0
        eta = brentq(fn, lo, s0, xtol=1e-15 * s0, rtol=4 * np.finfo(float).eps)
        xi = brentq(fn, s0, hi, xtol=1e-15 * s0, rtol=4 * np.finfo(float).eps)
    return Lemma21(d_lam, s0, f0, eta, xi)


# -- coupling quadratic ------------------------------------------------------

def coupling_quadratic(s, mu11: float, mu22: float, mu12: float):
    s = np.asarray(s, dtype=float)
    return mu11 * s**2 + mu22 * (1.0 - s) ** 2 - 2.0 * mu12 * s * (1.0 - s)


def s_min_and_g(mu11: float, mu22: float, mu12: float):
    """Minimizer of the coupling quadratic on ``[0, 1]`` and its minimum value."""
    _check_pos(mu11=mu11, mu22=mu22, mu12=mu12)
    tot = mu11 + mu22 + 2.0 * mu12
    return (mu22 + mu12) / tot, (mu11 * mu22 - mu12**2) / tot


def nonexist_ratio(mu11: float, mu22: float, mu12: float) -> float:
    return (mu11 * mu22 - mu12**2) / (mu11 + mu22)


def nonexist_threshold(p: float, lam: float) -> float:
    """Right-hand side of the trivial-solutions-only criterion, ``1 < p <= 2``."""
    _check_p(p, hi=2.0, closed_hi=True)
    _check_pos(lam=lam)
    if p == 2.0:
        return 4.0
    return (p - 1.0) ** 2 / 4.0 * (2.0**p * (2.0 - p) ** (2.0 - p) / lam ** (2.0 - p)) ** (2.0 / (p - 1.0))


# -- Sobolev constant --------------------------------------------------------

def sobolev_scaling_exponent(p: float) -> float:
    """``S(lam) = lam^k S(1)`` with ``k = (5-p)/(4(p+1))`` (from ``u(x) -> u(sqrt(lam) x)``)."""
    return (5.0 - p) / (4.0 * (p + 1.0))


_S_CACHE: dict = {}
_S_LOCK = threading.Lock()


def sobolev_constant(p: float, lam: float, override: float | None = None,
                     r_max: float = 40.0, n: int = 4000, theta_nodes: int = 128) -> float:
    """Best radial constant ``S`` with ``S ||u||_{p+1} <= ||u||_{H^1}``.

    Computed from the positive ground state ``Q`` of ``-Delta Q + lam Q = Q^p``,
    where the quotient attains ``||Q||_{H^1}^{(p-1)/(p+1)}``. Results are cached
    per ``(p, lam, r_max, n)``; ``override`` bypasses the computation.
    """
    if override is not None:
        _check_pos(sobolev=override)
        return float(override)
    _check_p(p)
    _check_pos(lam=lam)
    key = (float(p), float(lam), float(r_max), int(n))
    with _S_LOCK:
        if key in _S_CACHE:
            return _S_CACHE[key]
    from .scalar_sp import ground_state_nls

    q = ground_state_nls(p, lam, r_max=r_max, n=n)
    with _S_LOCK:
        _S_CACHE.setdefault(key, q.sobolev)
        return _S_CACHE[key]


@dataclass(frozen=True)
class ConstantsBundle:
    p: float
    lam: float
    sobolev: float
    lambda0: float
    lambda0_bar: float | None
    a_p: float
    d0_level: float
    s_min: float | None
    g_min: float | None
    d_lambda: float | None
    nonexist_threshold: float | None
    nonexist_ratio: float | None

    def as_dict(self) -> dict:
        d = asdict(self)
        return {k: (None if isinstance(v, float) and math.isinf(v) and k != "lambda0_bar"
                    else v) for k, v in d.items()}


def bundle(p: float, lam: float, S: float, mu=None) -> ConstantsBundle:
    """Every constant that applies at ``(p, lam)`` for embedding constant ``S``.

    Entries outside their domain of definition are ``None``.
    """
    s_min = g_min = ratio = None
    if mu is not None:
        s_min, g_min = s_min_and_g(*mu)
        ratio = nonexist_ratio(*mu)
    return ConstantsBundle(
        p=p, lam=lam, sobolev=S,
        lambda0=lambda0(p, lam, S),
        lambda0_bar=lambda0_bar(p, lam, S) if p >= 2.0 else None,
        a_p=a_of_p(p),
        d0_level=d0_level(p, S),
        s_min=s_min, g_min=g_min,
        d_lambda=_d_lambda(p, lam) if p < 2.0 else None,
        nonexist_threshold=nonexist_threshold(p, lam) if p <= 2.0 else None,
        nonexist_ratio=ratio,
    )
