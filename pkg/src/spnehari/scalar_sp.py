"""Radial solutions of the scalar Schrodinger-Poisson equation.

    -Delta w + lambda w + mu phi_w w = |w|^(p-1) w

The positive-energy solution minimizes the energy over the MINUS part of the
scalar Nehari set; the negative-energy solution (``1 < p < 2`` only)
minimizes it globally. Both are computed with the descent machinery of
:mod:`spnehari.descent` on a one-component model.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .descent import DescentOptions, minimize
from .errors import BranchUnavailable, ConfigError, NoProjection
from .functional import FiberingClass, Integrals, Model, Params, fibering_from_integrals
from .manifold import project_integrals
from .radial_grid import RadialFn, RadialGrid, make_grid

__all__ = [
    "NehariClass",
    "ScalarSolveResult",
    "NLSGroundState",
    "solve_scalar",
    "ground_state_nls",
    "gaussian_seed",
]


class NehariClass(str, enum.Enum):
    N_PLUS = "N_PLUS"
    N_MINUS = "N_MINUS"


@dataclass(frozen=True)
class ScalarSolveResult:
    w: RadialFn
    energy: float
    nehari_class: NehariClass
    residual_norm: float
    iterations: int
    integrals: Integrals
    mu: float

    @property
    def h1_norm(self) -> float:
        return math.sqrt(self.integrals.A)

    @property
    def nehari_residual(self) -> float:
        return abs(self.integrals.nehari) / self.integrals.A


@dataclass(frozen=True)
class NLSGroundState:
    """Positive solution ``Q`` of ``-Delta Q + lam Q = Q^p`` and its embedding constant."""

    w: RadialFn
    p: float
    lam: float
    norm_sq: float
    iterations: int

    @property
    def sobolev(self) -> float:
        """``||Q||_{H^1}^{(p-1)/(p+1)}``, the extremal value of ``||u||_{H^1} / ||u||_{p+1}``."""
        return self.norm_sq ** ((self.p - 1.0) / (2.0 * (self.p + 1.0)))


def _branch(b) -> FiberingClass:
    try:
        cls = FiberingClass(b.value if isinstance(b, enum.Enum) else str(b).upper())
    except ValueError:
        raise ConfigError(f"unknown branch {b!r}") from None
    if cls == FiberingClass.ZERO:
        raise ConfigError("branch must be MINUS or PLUS")
    return cls


# Widths of the Gaussian seed ladder, as fractions of r_max.
_WIDTHS = np.geomspace(1.0 / 160.0, 0.4, 17)


def gaussian_seed(model: Model, branch: FiberingClass, extra=()):
    """Best ray-projected seed among Gaussians ``exp(-(r/L)^2)`` and ``extra`` profiles.

    "Best" is the lowest energy at the branch's critical point of the ray.

    Raises
    ------
    NoProjection
        No candidate ray reaches the branch.
    """
    r = model.grid.nodes
    cands = [np.exp(-(r / (L * model.grid.r_max)) ** 2) for L in _WIDTHS]
    cands += [np.asarray(e, float) for e in extra]
    best = None
    for prof in cands:
        X = np.broadcast_to(prof, (model.ncomp, r.size)).copy()
        X[:, -1] = 0.0
        try:
            t = project_integrals(model.integrals(X)).t_for(branch)
        except NoProjection:
            continue
        E = model.integrals(t * X).energy
        if best is None or E < best[0]:
            best = (E, t * X)
    if best is None:
        raise NoProjection(f"no seed profile reaches the {branch.value} branch")
    return best[1]


def ground_state_nls(p: float, lam: float, r_max: float = 40.0, n: int = 4000,
                     grid: RadialGrid | None = None) -> NLSGroundState:
    """Ground state of the Coulomb-free equation, used for the embedding constant."""
    grid = grid or make_grid(r_max, n)
    prm = Params(lam, p, 1.0, 1.0, 1.0)
    model = Model(grid, prm, ncomp=1, coulomb=False)
    X0 = gaussian_seed(model, FiberingClass.MINUS)
    res = minimize(model, X0, FiberingClass.MINUS)
    ints = res.evaluation.integrals
    return NLSGroundState(RadialFn(grid, res.X[0]), p, lam, ints.A, res.iterations)


def solve_scalar(prm: Params, mu: float, branch, grid: RadialGrid | None = None,
                 opts: DescentOptions | None = None) -> ScalarSolveResult:
    """Positive radial solution on one branch of the scalar equation with coupling ``mu``.

    Parameters
    ----------
    prm : Params
        Supplies ``lambda`` and ``p``; its couplings are ignored.
    mu : float
        Coulomb coupling of the scalar equation.
    branch : {"MINUS", "PLUS"}
        MINUS: minimize over the MINUS Nehari set (positive energy). PLUS:
        global minimization (negative energy), ``1 < p < 2`` only.

    Raises
    ------
    BranchUnavailable
        PLUS requested with ``p >= 2``, or no state of negative energy found.
    NoProjection
        No seed reaches the requested Nehari branch.
    NoConvergence
        Descent and Newton polishing failed.
    """
    cls = _branch(branch)
    if not mu > 0:
        raise ConfigError(f"mu must be positive, got {mu!r}")
    if cls == FiberingClass.PLUS and prm.p >= 2.0:
        raise BranchUnavailable(f"negative-energy branch needs p < 2, got p={prm.p}")
    grid = grid or make_grid()
    model = Model(grid, prm.scalar(mu), ncomp=1)
    extra = ()
    if cls == FiberingClass.MINUS:
        extra = (ground_state_nls(prm.p, prm.lam, grid=grid).w.values,)
    X0 = gaussian_seed(model, cls, extra)
    res = minimize(model, X0, cls, opts)
    ev = res.evaluation
    ints = ev.integrals
    if cls == FiberingClass.PLUS and not ints.energy < 0:
        raise BranchUnavailable(f"no negative-energy state found (energy {ints.energy:.3e})")
    h2 = fibering_from_integrals(ints, 1.0).h2
    nc = NehariClass.N_MINUS if h2 < 0 else NehariClass.N_PLUS
    return ScalarSolveResult(RadialFn(grid, res.X[0]), ints.energy, nc, res.residual,
                             res.iterations, ints, mu)
