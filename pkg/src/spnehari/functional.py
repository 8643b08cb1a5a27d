"""Energy functional, its gradient, the Nehari value and the fibering map.

The discrete energy is

    J(u, v) = A/2 + B/4 - C/(p+1)

with ``A = ||(u, v)||_H^2``, ``B`` the Coulomb coupling
``mu11 (phi_u u^2) + mu22 (phi_v v^2) - 2 mu12 (phi_v u^2)`` and ``C`` the
theta-averaged power integral. The residual returned by :func:`residual` is
the exact gradient of this discrete ``J`` with respect to the nodal values,
divided by the ball mass matrix, so ``<residual(s), w>_{L^2}`` is the
directional derivative of ``J`` without any truncation error of its own.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from .angular import DEFAULT_M, ThetaQuadrature, theta_fields
from .errors import ConfigError, GridMismatch
from .hartree import potential_array
from .radial_grid import RadialFn, RadialGrid, grad_norm_sq_array, stiffness_apply

__all__ = [
    "Params",
    "PairFn",
    "FiberingClass",
    "FiberingReport",
    "Integrals",
    "Model",
    "energy",
    "residual",
    "nehari_value",
    "fibering",
    "fibering_from_integrals",
]


@dataclass(frozen=True)
class Params:
    """Parameters ``(lambda, p, mu11, mu22, mu12)`` of the coupled system."""

    lam: float
    p: float
    mu11: float
    mu22: float
    mu12: float

    def __post_init__(self):
        for name in ("lam", "p", "mu11", "mu22", "mu12"):
            val = getattr(self, name)
            if not np.isfinite(val):
                raise ConfigError(f"{name} must be finite, got {val!r}")
            object.__setattr__(self, name, float(val))
        if self.lam <= 0:
            raise ConfigError(f"lambda must be positive, got {self.lam}")
        if not 1.0 < self.p < 3.0:
            raise ConfigError(f"p must lie in (1, 3), got {self.p}")
        if min(self.mu11, self.mu22, self.mu12) <= 0:
            raise ConfigError("all coupling constants must be positive")

    @property
    def det(self) -> float:
        return self.mu11 * self.mu22 - self.mu12**2

    @property
    def is_ordered(self) -> bool:
        return self.mu11 <= self.mu22

    def swapped(self) -> "Params":
        return replace(self, mu11=self.mu22, mu22=self.mu11)

    def ordered(self) -> "Params":
        """Copy with ``mu11 <= mu22`` (the components swap roles)."""
        return self if self.is_ordered else self.swapped()

    def scalar(self, mu: float) -> "Params":
        """Parameters whose ``(u, 0)`` energy is the scalar functional with coupling ``mu``."""
        return replace(self, mu11=mu)

    def as_dict(self) -> dict:
        return {"lambda": self.lam, "p": self.p, "mu11": self.mu11,
                "mu22": self.mu22, "mu12": self.mu12}

    @classmethod
    def from_dict(cls, d: dict) -> "Params":
        lam = d["lambda"] if "lambda" in d else d["lam"]
        return cls(lam, d["p"], d["mu11"], d["mu22"], d["mu12"])


@dataclass(frozen=True)
class PairFn:
    u: RadialFn
    v: RadialFn

    def __post_init__(self):
        if self.u.grid != self.v.grid:
            raise GridMismatch("u and v must share a grid")

    @property
    def grid(self) -> RadialGrid:
        return self.u.grid

    @classmethod
    def from_arrays(cls, grid: RadialGrid, u, v) -> "PairFn":
        return cls(RadialFn(grid, u), RadialFn(grid, v))

    @classmethod
    def zeros(cls, grid: RadialGrid) -> "PairFn":
        z = np.zeros(grid.n)
        return cls.from_arrays(grid, z, z)

    def stack(self) -> np.ndarray:
        return np.vstack([self.u.values, self.v.values])

    def scaled(self, t: float) -> "PairFn":
        return PairFn(self.u * t, self.v * t)


class FiberingClass(str, enum.Enum):
    PLUS = "PLUS"
    ZERO = "ZERO"
    MINUS = "MINUS"


@dataclass(frozen=True)
class FiberingReport:
    t: float
    h: float
    h1: float
    h2: float
    cls: FiberingClass


@dataclass(frozen=True)
class Integrals:
    """The six integral coordinates of a state plus derived quantities.

    ``z1`` gradient energy, ``z2`` lambda-weighted mass, ``z3 = int phi_u u^2``,
    ``z4 = int phi_v v^2``, ``z5 = int phi_v u^2``, ``z6`` the theta-averaged
    power integral.
    """

    z1: float
    z2: float
    z3: float
    z4: float
    z5: float
    z6: float
    params: Params

    @property
    def A(self) -> float:
        return self.z1 + self.z2

    @property
    def B(self) -> float:
        prm = self.params
        return prm.mu11 * self.z3 + prm.mu22 * self.z4 - 2.0 * prm.mu12 * self.z5

    @property
    def C(self) -> float:
        return self.z6

    @property
    def energy(self) -> float:
        return 0.5 * self.A + 0.25 * self.B - self.C / (self.params.p + 1.0)

    @property
    def nehari(self) -> float:
        return self.A + self.B - self.C

    def as_tuple(self):
        return (self.z1, self.z2, self.z3, self.z4, self.z5, self.z6)


@dataclass
class Evaluation:
    """Energy, integrals and Euclidean gradient of the discrete functional."""

    X: np.ndarray
    integrals: Integrals
    grad: np.ndarray
    phi: np.ndarray

    @property
    def energy(self) -> float:
        return self.integrals.energy


class Model:
    """Discrete functional on a fixed grid.

    States are arrays of shape ``(ncomp, n)``. With ``ncomp == 1`` the state
    is ``(u, 0)``, whose energy is the scalar functional with coupling
    ``mu11``; the power term then needs no theta average. ``coulomb=False``
    drops the Hartree terms, leaving the plain power functional.
    """

    def __init__(self, grid: RadialGrid, params: Params, theta_nodes: int = DEFAULT_M,
                 ncomp: int = 2, coulomb: bool = True):
        if ncomp not in (1, 2):
            raise ConfigError("ncomp must be 1 or 2")
        self.grid = grid
        self.params = params
        self.m = ThetaQuadrature(theta_nodes).m
        self.ncomp = ncomp
        self.coulomb = coulomb

    def _potential(self, w):
        if not self.coulomb:
            return np.zeros_like(w)
        return potential_array(self.grid, w)

    def integrals(self, X: np.ndarray) -> Integrals:
        return self.evaluate(X, need_grad=False).integrals

    def evaluate(self, X: np.ndarray, need_grad: bool = True) -> Evaluation:
        grid, prm = self.grid, self.params
        X = np.atleast_2d(np.asarray(X, dtype=float))
        mass = grid.mass
        p = prm.p
        u = X[0]
        phi_u = self._potential(u)
        z1 = grad_norm_sq_array(grid, u)
        z2 = prm.lam * float(np.dot(mass, u * u))
        z3 = float(np.dot(mass, phi_u * u * u))
        if self.ncomp == 1:
            au = np.abs(u)
            z6 = float(np.dot(mass, au ** (p + 1.0)))
            ints = Integrals(z1, z2, z3, 0.0, 0.0, z6, prm)
            grad = None
            if need_grad:
                g = stiffness_apply(grid, u) + mass * (
                    (prm.lam + prm.mu11 * phi_u) * u - au ** (p - 1.0) * u)
                grad = g[None, :]
            return Evaluation(X, ints, grad, phi_u[None, :])

        v = X[1]
        phi_v = self._potential(v)
        z1 += grad_norm_sq_array(grid, v)
        z2 += prm.lam * float(np.dot(mass, v * v))
        z4 = float(np.dot(mass, phi_v * v * v))
        z5 = float(np.dot(mass, phi_v * u * u))
        P, Fa, Fb = theta_fields(u, v, p, self.m)
        z6 = float(np.dot(mass, P))
        ints = Integrals(z1, z2, z3, z4, z5, z6, prm)
        grad = None
        if need_grad:
            gu = stiffness_apply(grid, u) + mass * (
                (prm.lam + prm.mu11 * phi_u - prm.mu12 * phi_v) * u - Fa)
            gv = stiffness_apply(grid, v) + mass * (
                (prm.lam + prm.mu22 * phi_v - prm.mu12 * phi_u) * v - Fb)
            grad = np.vstack([gu, gv])
        return Evaluation(X, ints, grad, np.vstack([phi_u, phi_v]))

    def l2_residual(self, ev: Evaluation, dirichlet: bool = True) -> float:
        """Grid ``L^2`` norm of the strong residual ``grad / mass``."""
        g = ev.grad
        if dirichlet:
            g = g[:, :-1]
            mass = self.grid.mass[:-1]
        else:
            mass = self.grid.mass
        return float(np.sqrt(np.sum(g * g / mass)))


def _model_for(state: PairFn, prm: Params, theta_nodes: int) -> Model:
    return Model(state.grid, prm, theta_nodes, ncomp=2)


def integrals(state: PairFn, prm: Params, theta_nodes: int = DEFAULT_M) -> Integrals:
    return _model_for(state, prm, theta_nodes).integrals(state.stack())


def energy(state: PairFn, prm: Params, theta_nodes: int = DEFAULT_M) -> float:
    """Discrete energy ``J(u, v)``."""
    return integrals(state, prm, theta_nodes).energy


def residual(state: PairFn, prm: Params, theta_nodes: int = DEFAULT_M) -> PairFn:
    """Euler-Lagrange operator of the system applied to ``state``."""
    model = _model_for(state, prm, theta_nodes)
    ev = model.evaluate(state.stack())
    R = ev.grad / state.grid.mass
    return PairFn.from_arrays(state.grid, R[0], R[1])


def nehari_value(state: PairFn, prm: Params, theta_nodes: int = DEFAULT_M) -> float:
    """``F(u, v) = <J'(u, v), (u, v)>``."""
    return integrals(state, prm, theta_nodes).nehari


def classify_h2(h2: float, scale: float, rel_tol: float = 1e-9) -> FiberingClass:
    tol = rel_tol * abs(scale)
    if h2 < -tol:
        return FiberingClass.MINUS
    if h2 > tol:
        return FiberingClass.PLUS
    return FiberingClass.ZERO


def fibering_from_integrals(ints: Integrals, t: float, rel_tol: float = 1e-9) -> FiberingReport:
    if not t > 0:
        raise ConfigError(f"fibering parameter must be positive, got {t!r}")
    A, B, C, p = ints.A, ints.B, ints.C, ints.params.p
    h = 0.5 * t * t * A + 0.25 * t**4 * B - t ** (p + 1.0) * C / (p + 1.0)
    h1 = t * A + t**3 * B - t**p * C
    h2 = A + 3.0 * t * t * B - p * t ** (p - 1.0) * C
    return FiberingReport(t, h, h1, h2, classify_h2(h2, A, rel_tol))


def fibering(state: PairFn, prm: Params, t: float, theta_nodes: int = DEFAULT_M,
             rel_tol: float = 1e-9) -> FiberingReport:
    """Fibering map ``t -> J(t u, t v)`` and its first two derivatives at ``t``."""
    if not t > 0:
        raise ConfigError(f"fibering parameter must be positive, got {t!r}")
    return fibering_from_integrals(integrals(state, prm, theta_nodes), t, rel_tol)
