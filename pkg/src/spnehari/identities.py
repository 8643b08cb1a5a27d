"""Integral coordinates of a state and the identities satisfied by solutions.

For a solution the six integrals ``z1..z6`` obey the energy relation
``J = theta``, the Nehari identity and the Pohozaev identity, three linear
equations whose general solution is

    z = theta b_theta + s b_s + t b_t + w b_w

with the basis vectors of :func:`basis`. This module extracts ``z``,
measures the two identity residuals, inverts the parametrization and checks
the sign condition under which a solution lies on the MINUS part of the
Nehari manifold.
"""
from __future__ import annotations

import enum
import json
from dataclasses import asdict, dataclass

import numpy as np

from .angular import DEFAULT_M
from .errors import InconsistentZ
from .functional import Integrals, PairFn, Params, integrals

__all__ = [
    "ZVector",
    "CoeffDecomp",
    "GroundStateStatus",
    "GroundStateCheck",
    "IdentityReport",
    "z_vector",
    "check_identities",
    "basis",
    "decompose",
    "reconstruct",
    "c1_value",
    "check_ground_state_condition",
    "identity_report",
]

_EPS = 1e-300


@dataclass(frozen=True)
class ZVector:
    z1: float
    z2: float
    z3: float
    z4: float
    z5: float
    z6: float

    @classmethod
    def from_integrals(cls, ints: Integrals) -> "ZVector":
        return cls(*ints.as_tuple())

    @classmethod
    def from_array(cls, a) -> "ZVector":
        a = np.asarray(a, dtype=float)
        if a.shape != (6,):
            raise ValueError(f"expected six coordinates, got shape {a.shape}")
        return cls(*map(float, a))

    def as_array(self) -> np.ndarray:
        return np.array([self.z1, self.z2, self.z3, self.z4, self.z5, self.z6])

    def coupling(self, prm: Params) -> float:
        return prm.mu11 * self.z3 + prm.mu22 * self.z4 - 2.0 * prm.mu12 * self.z5

    def energy(self, prm: Params) -> float:
        return (0.5 * (self.z1 + self.z2) + 0.25 * self.coupling(prm)
                - self.z6 / (prm.p + 1.0))

    def constraint_gap(self, lam: float) -> float:
        """``256/(27 pi^2 lam^3) z2^3 z1 - (z3^2 + z4^2)``; nonnegative for any ``H^1`` pair."""
        c = 256.0 / (27.0 * np.pi**2 * lam**3)
        return c * self.z2**3 * self.z1 - (self.z3**2 + self.z4**2)


@dataclass(frozen=True)
class CoeffDecomp:
    theta: float
    s: float
    t: float
    w: float


class GroundStateStatus(str, enum.Enum):
    IN_M_MINUS = "IN_M_MINUS"
    VIOLATED = "VIOLATED"


@dataclass(frozen=True)
class GroundStateCheck:
    status: GroundStateStatus
    c1: float
    w_below_c1_bound: bool
    w_below_z2_bound: bool | None
    feasible: bool
    decomp: CoeffDecomp


def z_vector(state: PairFn, prm: Params, theta_nodes: int = DEFAULT_M) -> ZVector:
    return ZVector.from_integrals(integrals(state, prm, theta_nodes))


def _as_z(obj, prm, theta_nodes) -> ZVector:
    return obj if isinstance(obj, ZVector) else z_vector(obj, prm, theta_nodes)


def check_identities(state, prm: Params, theta_nodes: int = DEFAULT_M):
    """Relative residuals ``(nehari, pohozaev)`` of a state or a :class:`ZVector`.

    Both are divided by ``max(z1 + z2, 1e-300)``.
    """
    z = _as_z(state, prm, theta_nodes)
    B = z.coupling(prm)
    scale = max(z.z1 + z.z2, _EPS)
    neh = abs(z.z1 + z.z2 + B - z.z6) / scale
    poh = abs(0.5 * z.z1 + 1.5 * z.z2 + 1.25 * B - 3.0 * z.z6 / (prm.p + 1.0)) / scale
    return neh, poh


def basis(prm: Params) -> np.ndarray:
    """Columns ``b_theta, b_s, b_t, b_w`` of the general solution, shape ``(6, 4)``."""
    p, m11, m22, m12 = prm.p, prm.mu11, prm.mu22, prm.mu12
    return np.array([
        [1.0, 0.0, 0.0, p - 1.0],
        [3.0, 0.0, 0.0, -2.0 * (p - 2.0)],
        [0.0, 0.0, 1.0 / m11, 0.0],
        [0.0, 1.0 / m22, 0.0, 0.0],
        [2.0 / m12, 0.5 / m12, 0.5 / m12, -(p - 1.0) / m12],
        [0.0, 0.0, 0.0, p + 1.0],
    ])


def reconstruct(dec: CoeffDecomp, prm: Params) -> ZVector:
    return ZVector.from_array(basis(prm) @ np.array([dec.theta, dec.s, dec.t, dec.w]))


def decompose(z: ZVector, prm: Params, tol: float = 1e-9) -> CoeffDecomp:
    """Coefficients ``(theta, s, t, w)`` of ``z``.

    ``theta`` comes from the energy expressed through ``z2`` and the coupling
    (valid on solutions), ``t = mu11 z3``, ``s = mu22 z4`` and
    ``w = z6/(p+1)``.

    Raises
    ------
    InconsistentZ
        The reconstruction differs from ``z`` by more than ``tol`` relative
        to the largest entry, both measured in the coordinates
        ``(z1, z2, mu11 z3, mu22 z4, mu12 z5, z6)``; ``z`` does not come from
        a solution.
    """
    p = prm.p
    theta = ((p - 1.0) * z.z2 + (p - 2.0) * z.coupling(prm)) / (5.0 - p)
    dec = CoeffDecomp(theta, prm.mu22 * z.z4, prm.mu11 * z.z3, z.z6 / (p + 1.0))
    # compare in the coupling-weighted coordinates so the test does not
    # depend on the size of the mu's (the z5 row carries a factor 1/mu12)
    wt = np.array([1.0, 1.0, prm.mu11, prm.mu22, prm.mu12, 1.0])
    za = wt * z.as_array()
    err = np.max(np.abs(wt * reconstruct(dec, prm).as_array() - za))
    scale = max(np.max(np.abs(za)), _EPS)
    if err > tol * scale:
        raise InconsistentZ(f"reconstruction error {err / scale:.3e} exceeds {tol:.1e}")
    return dec


def c1_value(z: ZVector, prm: Params) -> float:
    """``-(p-1)(z1+z2) + (3-p) coupling``, i.e. the second fibering derivative at 1."""
    return -(prm.p - 1.0) * (z.z1 + z.z2) + (3.0 - prm.p) * z.coupling(prm)


def check_ground_state_condition(z: ZVector, prm: Params, tol: float = 1e-9) -> GroundStateCheck:
    """Sign test placing a solution on the MINUS part of the Nehari manifold.

    Also reports the equivalent bound ``w < 8 theta/((p-1)(3-p))``, the
    bound ``w < 3 theta/(2p-4)`` (``p > 2`` only, else ``None``) and the
    positivity conditions on the coefficients.
    """
    dec = decompose(z, prm, tol)
    p, th, w = prm.p, dec.theta, dec.w
    c1 = c1_value(z, prm)
    below_c1 = w < 8.0 * th / ((p - 1.0) * (3.0 - p))
    below_z2 = (w < 3.0 * th / (2.0 * p - 4.0)) if p > 2.0 else None
    feasible = (3.0 * th - 2.0 * w * (p - 2.0) > 0 and 4.0 * th + dec.s + dec.t - 2.0 * w * (p - 1.0) > 0
                and dec.s > 0 and dec.t > 0 and w > 0)
    status = GroundStateStatus.IN_M_MINUS if c1 < 0 else GroundStateStatus.VIOLATED
    return GroundStateCheck(status, c1, below_c1, below_z2, feasible, dec)


@dataclass(frozen=True)
class IdentityReport:
    z: list
    theta: float | None
    s: float | None
    t: float | None
    w: float | None
    nehari_residual: float
    pohozaev_residual: float
    c1: bool

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def identity_report(state, prm: Params, theta_nodes: int = DEFAULT_M,
                    tol: float = 1e-3) -> IdentityReport:
    """Serializable identity record; coefficient fields are ``None`` if ``z`` is inconsistent."""
    z = _as_z(state, prm, theta_nodes)
    neh, poh = check_identities(z, prm)
    try:
        dec = decompose(z, prm, tol)
        coeffs = (dec.theta, dec.s, dec.t, dec.w)
    except InconsistentZ:
        coeffs = (None, None, None, None)
    return IdentityReport(z.as_array().tolist(), *coeffs, neh, poh, bool(c1_value(z, prm) < 0))
