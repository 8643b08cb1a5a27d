"""H^1-preconditioned descent and Newton-Krylov polishing for the discrete functional.

Every state is an array of shape ``(ncomp, n)``; the last node is pinned to
zero (Dirichlet at ``r_max``). The preconditioner is the discrete
``-Delta + shift`` operator, a symmetric positive tridiagonal matrix that is
Cholesky-factored once per solve.

Constrained descent works with the reduced functional
``X -> J(t(X) X)`` where ``t(X)`` is the MINUS (or PLUS) critical point of
the ray through ``X``. On the manifold its gradient coincides with the
gradient of ``J`` itself, so the step is an ordinary preconditioned
gradient step followed by a ray projection.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_solve_banded, cholesky_banded
from scipy.sparse.linalg import LinearOperator, gmres

from .errors import NoConvergence, NoProjection
from .functional import Evaluation, FiberingClass, Model
from .manifold import project_integrals
from .radial_grid import RadialGrid, stiffness_bands

__all__ = ["H1Preconditioner", "DescentOptions", "DescentResult", "minimize", "newton_polish"]

log = logging.getLogger(__name__)


class H1Preconditioner:
    """Factored ``K + shift * M`` on the free nodes (all but the last)."""

    def __init__(self, grid: RadialGrid, shift: float):
        diag, off = stiffness_bands(grid)
        d = diag[:-1] + shift * grid.mass[:-1]
        ab = np.zeros((2, grid.n - 1))
        ab[0, 1:] = off[:-1]
        ab[1] = d
        self._cb = cholesky_banded(ab)
        self.n = grid.n

    def solve(self, G: np.ndarray) -> np.ndarray:
        G = np.atleast_2d(G)
        out = np.zeros_like(G)
        out[:, :-1] = cho_solve_banded((self._cb, False), G[:, :-1].T).T
        return out


@dataclass
class DescentOptions:
    max_iter: int = 20000
    tol: float = 1e-8          # residual relative to the L2 norm of the state
    energy_tol: float = 1e-12  # relative energy change over `stall_window` steps
    stall_window: int = 10
    armijo: float = 1e-4
    step_max: float = 4.0
    positive: bool = True
    polish: bool = True
    polish_tol: float = 1e-10


@dataclass
class DescentResult:
    X: np.ndarray
    evaluation: Evaluation
    iterations: int
    converged: bool
    residual: float
    history: list = field(default_factory=list, repr=False)


def _l2(model: Model, X) -> float:
    return float(np.sqrt(np.sum(model.grid.mass * X * X)))


def _project(model: Model, X: np.ndarray, branch: FiberingClass | None) -> np.ndarray:
    if branch is None:
        return X
    proj = project_integrals(model.integrals(X))
    return X * proj.t_for(branch)


def _clean(X, positive):
    X = np.abs(X) if positive else X.copy()
    X[:, -1] = 0.0
    return X


def minimize(model: Model, X0: np.ndarray, branch: FiberingClass | None = None,
             opts: DescentOptions | None = None, precond: H1Preconditioner | None = None,
             stop=None) -> DescentResult:
    """Minimize ``J`` (``branch=None``) or the reduced functional on one Nehari branch.

    Steps are ``X - a P^{-1} grad J(X)`` with Armijo backtracking on the
    (reduced) energy; the step length grows after every accepted step. The
    loop stops when the strong residual drops below ``opts.tol`` times the
    state's ``L^2`` norm or the energy stalls, after which an optional
    Newton-Krylov pass polishes the critical point. ``stop(X, ev)`` may end
    the loop early (the result is then marked not converged and not polished).

    Raises
    ------
    NoConvergence
        Iteration cap reached without meeting either stopping rule.
    NoProjection
        The initial state cannot be scaled onto the requested branch.
    """
    opts = opts or DescentOptions()
    P = precond or H1Preconditioner(model.grid, model.params.lam)
    X = _project(model, _clean(np.atleast_2d(np.asarray(X0, float)), opts.positive), branch)
    ev = model.evaluate(X)
    alpha = 1.0
    energies = [ev.energy]
    converged = False
    it = 0
    res = model.l2_residual(ev)
    for it in range(1, opts.max_iter + 1):
        if stop is not None and stop(X, ev):
            return DescentResult(X, ev, it, False, model.l2_residual(ev), energies)
        res = model.l2_residual(ev)
        if res <= opts.tol * _l2(model, X):
            converged = True
            break
        g = ev.grad.copy()
        g[:, -1] = 0.0
        d = P.solve(g)
        slope = float(np.sum(g * d))
        E0 = ev.energy
        while True:
            try:
                Xn = _project(model, _clean(X - alpha * d, opts.positive), branch)
            except NoProjection:
                Xn = None
            if Xn is not None:
                evn = model.evaluate(Xn)
                if evn.energy <= E0 - opts.armijo * alpha * slope:
                    break
            alpha *= 0.5
            if alpha < 1e-14:
                evn = None
                break
        if evn is None:
            log.debug("line search stalled at iteration %d", it)
            break
        X, ev = Xn, evn
        alpha = min(2.0 * alpha, opts.step_max)
        energies.append(ev.energy)
        if len(energies) > opts.stall_window:
            dE = abs(energies[-1 - opts.stall_window] - energies[-1])
            if dE <= opts.energy_tol * max(abs(energies[-1]), 1e-300):
                break
    else:
        if not opts.polish:
            raise NoConvergence(f"descent did not converge in {opts.max_iter} iterations",
                                state=X, iterations=opts.max_iter)

    if not converged and opts.polish:
        X, ev = newton_polish(model, X, P, tol=opts.polish_tol, positive=opts.positive)
        res = model.l2_residual(ev)
        converged = res <= max(opts.tol, opts.polish_tol) * _l2(model, X)
        if not converged:
            raise NoConvergence(f"Newton polish stopped at residual {res:.3e}",
                                state=X, iterations=it)
    elif converged and opts.polish and res > opts.polish_tol * _l2(model, X):
        X, ev = newton_polish(model, X, P, tol=opts.polish_tol, positive=opts.positive)
        res = model.l2_residual(ev)
    return DescentResult(X, ev, it, converged, res, energies)


def newton_polish(model: Model, X: np.ndarray, precond: H1Preconditioner,
                  tol: float = 1e-10, max_steps: int = 30, positive: bool = True):
    """Inexact Newton on ``grad J = 0`` with preconditioned GMRES.

    Hessian-vector products are central differences of the exact discrete
    gradient. Each step is halved until the preconditioned residual norm
    decreases.

    Raises
    ------
    NoConvergence
        ``max_steps`` reached above ``tol``.
    """
    ncomp, n = X.shape
    m = n - 1
    shape = (ncomp, m)

    def full(x):
        Y = np.zeros((ncomp, n))
        Y[:, :-1] = x.reshape(shape)
        return Y

    def pnorm(g):
        d = precond.solve(g)
        return float(np.sqrt(np.sum(g * d)))

    ev = model.evaluate(X)
    scale = _l2(model, X)
    for step in range(max_steps):
        res = model.l2_residual(ev)
        if res <= tol * scale:
            return X, ev
        g = ev.grad[:, :-1].ravel()
        xnorm = np.max(np.abs(X))
        Xc = X

        def hv(v, Xc=Xc):
            vmax = np.max(np.abs(v))
            if vmax == 0:
                return np.zeros_like(v)
            eps = 1e-6 * xnorm / vmax
            V = full(v)
            gp = model.evaluate(Xc + eps * V).grad[:, :-1]
            gm = model.evaluate(Xc - eps * V).grad[:, :-1]
            return ((gp - gm) / (2.0 * eps)).ravel()

        H = LinearOperator((ncomp * m, ncomp * m), matvec=hv, dtype=float)
        M = LinearOperator((ncomp * m, ncomp * m),
                           matvec=lambda r: precond.solve(full(r))[:, :-1].ravel(),
                           dtype=float)
        delta, info = gmres(H, -g, M=M, rtol=1e-8, restart=60, maxiter=4)
        base = pnorm(ev.grad * np.r_[np.ones(m), 0.0])
        a = 1.0
        while a > 1e-4:
            Xn = X + a * full(delta)
            if positive:
                Xn = np.abs(Xn)
            evn = model.evaluate(Xn)
            gn = evn.grad.copy()
            gn[:, -1] = 0.0
            if pnorm(gn) < base:
                break
            a *= 0.5
        else:
            break
        X, ev = Xn, evn
        log.debug("newton step %d: residual %.3e (gmres info %d)", step, model.l2_residual(ev), info)
    res = model.l2_residual(ev)
    if res <= tol * scale:
        return X, ev
    raise NoConvergence(f"Newton polish stopped at residual {res:.3e}", state=X, iterations=max_steps)
