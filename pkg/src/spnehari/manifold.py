"""Projection onto the Nehari manifold along rays and the sublevel split.

Along the ray ``t -> (t u, t v)`` the derivative of the energy is
``h'(t) = t g(t)`` with

    g(t) = A + B t^2 - C t^(p-1),      A > 0, 1 < p < 3.

Since ``p - 1 < 2`` the shape of ``g`` is fixed by the sign of ``B``:

* ``B <= 0``: ``g`` falls from ``A`` to ``-inf``, one root, a local maximum
  of ``h`` (class MINUS).
* ``B > 0``: ``g`` has a single interior minimum at
  ``t* = ((p-1) C / (2B))^(1/(3-p))`` and tends to ``+inf``; there are zero
  or two roots, the smaller one MINUS and the larger one PLUS.

Brackets come from ``t*`` directly, so no sampling ladder is needed.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .angular import DEFAULT_M
from .constants import d0_level, norm_threshold, s_min_and_g
from .errors import NoProjection, NotOnManifold
from .functional import (
    FiberingClass,
    FiberingReport,
    Integrals,
    PairFn,
    Params,
    fibering_from_integrals,
    integrals,
)
from .radial_grid import RadialFn

__all__ = [
    "ProjectionResult",
    "Sublevel",
    "fibering_roots",
    "project_integrals",
    "project_nehari",
    "seed_pair",
    "classify_sublevel",
]

# |g(t*)| below this fraction of A counts as a double root.
_DOUBLE_ROOT_TOL = 1e-12


class Sublevel(str, enum.Enum):
    M1 = "M1"
    M2 = "M2"
    NEITHER = "NEITHER"


@dataclass(frozen=True)
class ProjectionResult:
    """Positive critical points of the fibering map of one ray."""

    t_minus: float | None
    t_plus: float | None
    report_minus: FiberingReport | None
    report_plus: FiberingReport | None
    degenerate: bool = False

    def t_for(self, cls: FiberingClass) -> float:
        t = self.t_minus if cls == FiberingClass.MINUS else self.t_plus
        if t is None:
            raise NoProjection(f"ray has no {cls.value} critical point")
        return t


def _polish(g, dg, a, b):
    """Brent on ``[a, b]`` then up to five guarded Newton steps."""
    t = brentq(g, a, b, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    for _ in range(5):
        d = dg(t)
        if d == 0:
            break
        t_new = t - g(t) / d
        if not a <= t_new <= b or abs(g(t_new)) >= abs(g(t)):
            break
        t = t_new
    return t


def fibering_roots(A: float, B: float, C: float, p: float) -> list:
    """Ascending positive roots of ``g(t) = A + B t^2 - C t^(p-1)``.

    A double root (``g(t*) = 0`` up to rounding) is returned once.
    """
    if not A > 0:
        raise NoProjection("zero state has no Nehari scaling")
    q = p - 1.0
    g = lambda t: A + B * t * t - C * t**q
    dg = lambda t: 2.0 * B * t - q * C * t ** (q - 1.0)

    if C <= 0:
        return [math.sqrt(-A / B)] if B < 0 else []
    ts = None
    if B > 0:
        with np.errstate(over="ignore"):
            ts = float(np.power(q * C / (2.0 * B), 1.0 / (3.0 - p)))
        if not math.isfinite(B * ts * ts):
            ts = None  # the PLUS root is beyond floating range; treat B as 0
    if ts is None:
        hi = 1.0
        while g(hi) > 0:
            hi *= 2.0
        lo = hi
        while g(lo) <= 0:
            lo *= 0.5
        return [_polish(g, dg, lo, hi)]

    gs = g(ts)
    if gs > _DOUBLE_ROOT_TOL * A:
        return []
    if gs >= -_DOUBLE_ROOT_TOL * A:
        return [ts]
    lo = ts
    while g(lo) <= 0:
        lo *= 0.5
    hi = ts
    while g(hi) <= 0:
        hi *= 2.0
        if not math.isfinite(g(hi)):
            return [_polish(g, dg, lo, ts)]
    return [_polish(g, dg, lo, ts), _polish(g, dg, ts, hi)]


def project_integrals(ints: Integrals, rel_tol: float = 1e-9) -> ProjectionResult:
    """:class:`ProjectionResult` from precomputed integrals of the ray's base state."""
    roots = fibering_roots(ints.A, ints.B, ints.C, ints.params.p)
    if not roots:
        raise NoProjection("fibering derivative has no positive root")
    reports = [fibering_from_integrals(ints, t, rel_tol) for t in roots]
    degenerate = any(r.cls == FiberingClass.ZERO for r in reports)
    minus = [r for r in reports if r.cls == FiberingClass.MINUS]
    plus = [r for r in reports if r.cls == FiberingClass.PLUS]
    rm = minus[0] if minus else None
    rp = plus[-1] if plus else None
    return ProjectionResult(rm.t if rm else None, rp.t if rp else None, rm, rp, degenerate)


def project_nehari(state: PairFn, prm: Params, theta_nodes: int = DEFAULT_M,
                   rel_tol: float = 1e-9) -> ProjectionResult:
    """Scalings ``t`` with ``(t u, t v)`` on the Nehari manifold.

    Raises
    ------
    NoProjection
        The fibering map of the ray has no positive critical point.
    """
    return project_integrals(integrals(state, prm, theta_nodes), rel_tol)


def seed_pair(w: RadialFn, prm: Params) -> PairFn:
    """``(sqrt(s) w, sqrt(1 - s) w)`` with ``s`` the minimizer of the coupling quadratic."""
    s, _ = s_min_and_g(prm.mu11, prm.mu22, prm.mu12)
    return PairFn(w * math.sqrt(s), w * math.sqrt(1.0 - s))


def classify_sublevel(state: PairFn, prm: Params, S: float, theta_nodes: int = DEFAULT_M,
                      tol: float = 1e-8) -> Sublevel:
    """Place a Nehari state in the low-norm (M1) or high-norm (M2) part of the sublevel set.

    ``S`` enters only through the energy level ``D0``. The norm threshold uses
    ``mu22``.

    Raises
    ------
    NotOnManifold
        ``|F| > tol * ||state||_H^2``.
    """
    ints = integrals(state, prm, theta_nodes)
    if abs(ints.nehari) > tol * max(ints.A, np.finfo(float).tiny):
        raise NotOnManifold(f"Nehari value {ints.nehari:.3e} exceeds tolerance")
    if not ints.energy < d0_level(prm.p, S):
        return Sublevel.NEITHER
    norm = math.sqrt(ints.A)
    thr = norm_threshold(prm.p, prm.lam, prm.mu22)
    if norm < thr:
        return Sublevel.M1
    if norm > thr:
        return Sublevel.M2
    return Sublevel.NEITHER
