"""End-to-end pipelines: existence solve, ground-state certification,
nonexistence probe, two-solution search and parameter sweeps.
"""
from __future__ import annotations

import csv
import enum
import io
import itertools
import logging
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import constants as K
from .angular import DEFAULT_M
from .descent import DescentOptions, minimize
from .errors import (
    ConfigError,
    NoProjection,
    NotOnManifold,
    OrderingViolation,
    SemitrivialCollapse,
    SPNehariError,
)
from .functional import FiberingClass, Model, PairFn, Params, fibering_from_integrals
from .identities import (
    GroundStateCheck,
    IdentityReport,
    ZVector,
    check_ground_state_condition,
    identity_report,
)
from .manifold import Sublevel, classify_sublevel, project_integrals, seed_pair
from .radial_grid import RadialGrid, make_grid
from .scalar_sp import ScalarSolveResult, gaussian_seed, solve_scalar

__all__ = [
    "SolverSettings",
    "SolveOutcome",
    "Certification",
    "CertifyStatus",
    "ProbeStatus",
    "ProbeResult",
    "find_positive_solution",
    "certify_ground_state",
    "nonexistence_probe",
    "find_two_solutions",
    "sweep",
    "SWEEP_COLUMNS",
]

log = logging.getLogger(__name__)

VECTORIAL_REL = 1e-6
POSITIVE_ATOL = -1e-12
DECAY_NORM = 1e-6


@dataclass
class SolverSettings:
    """Discretization and solver knobs shared by every pipeline."""

    r_max: float = 40.0
    n: int = 4000
    theta_nodes: int = DEFAULT_M
    sobolev: float | None = None
    descent: DescentOptions = field(default_factory=DescentOptions)
    identity_tol: float = 1e-3

    def grid(self) -> RadialGrid:
        return make_grid(self.r_max, self.n)

    def sobolev_constant(self, prm: Params) -> float:
        return K.sobolev_constant(prm.p, prm.lam, self.sobolev, self.r_max, self.n)


@dataclass
class SolveOutcome:
    state: PairFn
    energy: float
    classification: Sublevel
    identity_report: IdentityReport
    vectorial: bool
    positive: bool
    fibering_class: FiberingClass
    residual: float
    iterations: int
    sobolev: float
    scalar: ScalarSolveResult | None = None
    notes: list = field(default_factory=list)

    @property
    def norm(self) -> float:
        z = self.identity_report.z
        return math.sqrt(z[0] + z[1])

    @property
    def nehari_residual(self) -> float:
        return self.identity_report.nehari_residual

    @property
    def pohozaev_residual(self) -> float:
        return self.identity_report.pohozaev_residual


def _warn(notes, msg):
    notes.append(msg)
    warnings.warn(msg, RuntimeWarning, stacklevel=3)


def _component_norms(grid: RadialGrid, X):
    return np.sqrt(np.sum(grid.mass * X * X, axis=1))


def _outcome(model: Model, X, res, S, settings, notes, scalar=None) -> SolveOutcome:
    prm, grid = model.params, model.grid
    state = PairFn.from_arrays(grid, X[0], X[1])
    ints = model.integrals(X)
    norms = _component_norms(grid, X)
    vectorial = bool(norms.min() > VECTORIAL_REL * norms.sum())
    positive = bool(np.all(X[:, :-1] > POSITIVE_ATOL))
    try:
        cls = classify_sublevel(state, prm, S, settings.theta_nodes)
    except NotOnManifold:
        cls = Sublevel.NEITHER
        notes.append("state is off the Nehari manifold")
    rep = identity_report(ZVector.from_integrals(ints), prm, tol=settings.identity_tol)
    return SolveOutcome(state, ints.energy, cls, rep, vectorial, positive,
                        fibering_from_integrals(ints, 1.0).cls, res.residual, res.iterations,
                        S, scalar, notes)


def _unswap_outcome(out: SolveOutcome, prm: Params) -> SolveOutcome:
    """Map an outcome computed with ``mu11 <= mu22`` back to the caller's ordering."""
    st = out.state
    out.state = PairFn(st.v, st.u)
    # z5 is not symmetric under the swap, so the record is recomputed
    ints = Model(st.grid, prm).integrals(out.state.stack())
    out.identity_report = identity_report(ZVector.from_integrals(ints), prm)
    return out


def find_positive_solution(prm: Params, settings: SolverSettings | None = None) -> SolveOutcome:
    """Positive vectorial solution of positive energy on the MINUS branch.

    Pipeline: scalar MINUS solution for ``mu11``, the mixed seed pair, its
    MINUS Nehari scaling, then Nehari-constrained descent. When the scalar
    branch or the seed projection is unavailable, the best Gaussian pair on
    the MINUS branch seeds the descent instead (noted in the outcome).

    Raises
    ------
    SemitrivialCollapse
        One component vanished; the outcome is attached.
    NoConvergence
    NoProjection
        No seed reaches the MINUS branch.
    """
    settings = settings or SolverSettings()
    notes: list = []
    swapped = not prm.is_ordered
    work = prm.ordered()
    S = settings.sobolev_constant(work)
    L0 = K.lambda0(work.p, work.lam, S)
    if not work.mu11 < L0:
        _warn(notes, f"mu11={work.mu11:g} is not below Lambda0={L0:.6g}; existence is not guaranteed")
    grid = settings.grid()
    model = Model(grid, work, settings.theta_nodes)

    scalar = None
    seed = None
    try:
        scalar = solve_scalar(work, work.mu11, FiberingClass.MINUS, grid, settings.descent)
        X = seed_pair(scalar.w, work).stack()
        seed = X * project_integrals(model.integrals(X)).t_for(FiberingClass.MINUS)
    except NoProjection as exc:
        notes.append(f"scalar seed unavailable ({exc}); using Gaussian pair seed")
    if seed is None:
        s, _ = K.s_min_and_g(work.mu11, work.mu22, work.mu12)
        mix = np.sqrt([s, 1.0 - s])[:, None]
        seed = mix * gaussian_seed(_MixedModel(model, mix), FiberingClass.MINUS)[0]

    res = minimize(model, seed, FiberingClass.MINUS, settings.descent)
    out = _outcome(model, res.X, res, S, settings, notes, scalar)
    if swapped:
        out = _unswap_outcome(out, prm)
    if not out.vectorial:
        beta = scalar.energy if scalar else math.nan
        out.notes.append(f"semitrivial: energy {out.energy:.10g} vs scalar level {beta:.10g}")
        raise SemitrivialCollapse("solution collapsed onto one component", outcome=out)
    return out


class _MixedModel:
    """Adapter evaluating a pair model on profiles split by fixed weights."""

    def __init__(self, model: Model, mix):
        self.model, self.mix = model, mix
        self.grid, self.ncomp = model.grid, 1

    def integrals(self, X):
        return self.model.integrals(self.mix * X[0])


# -- certification -----------------------------------------------------------

class CertifyStatus(str, enum.Enum):
    CERTIFIED = "CERTIFIED"
    NOT_APPLICABLE = "NOT_APPLICABLE"
    FAILED = "FAILED"


@dataclass
class Certification:
    status: CertifyStatus
    reasons: list
    check: GroundStateCheck | None = None


def certify_ground_state(outcome: SolveOutcome, prm: Params,
                         settings: SolverSettings | None = None) -> Certification:
    """Ground-state certificate for an outcome of :func:`find_positive_solution`.

    Gates: ``2 <= p < 3``, ``mu_ii < min(Lambda0, Lambda0_bar)`` and
    ``det(mu) >= 0``. With the gates open the outcome must have energy below
    ``D0`` and pass the MINUS sign test on its integral coordinates;
    otherwise the result is FAILED.
    """
    settings = settings or SolverSettings()
    S = outcome.sobolev
    reasons = []
    if not 2.0 <= prm.p < 3.0:
        return Certification(CertifyStatus.NOT_APPLICABLE, [f"p={prm.p} outside [2, 3)"])
    bound = min(K.lambda0(prm.p, prm.lam, S), K.lambda0_bar(prm.p, prm.lam, S))
    if not max(prm.mu11, prm.mu22) < bound:
        reasons.append(f"max(mu11, mu22) not below {bound:.6g}")
    if prm.det < 0:
        reasons.append("det(mu) < 0")
    if reasons:
        return Certification(CertifyStatus.NOT_APPLICABLE, reasons)
    z = ZVector.from_array(outcome.identity_report.z)
    D0 = K.d0_level(prm.p, S)
    if not outcome.energy < D0:
        reasons.append(f"energy {outcome.energy:.6g} not below D0={D0:.6g}")
    try:
        chk = check_ground_state_condition(z, prm, settings.identity_tol)
    except SPNehariError as exc:
        return Certification(CertifyStatus.FAILED, reasons + [str(exc)])
    if chk.status.value != "IN_M_MINUS":
        reasons.append(f"sign test failed (c1={chk.c1:.6g})")
    status = CertifyStatus.FAILED if reasons else CertifyStatus.CERTIFIED
    return Certification(status, reasons, chk)


# -- nonexistence probe --------------------------------------------------------

class ProbeStatus(str, enum.Enum):
    ALL_DECAYED = "ALL_DECAYED"
    SURVIVOR = "SURVIVOR"


@dataclass
class ProbeResult:
    status: ProbeStatus
    final_norms: list
    survivor: PairFn | None = None
    survivor_report: IdentityReport | None = None
    notes: list = field(default_factory=list)


def probe_seeds(grid: RadialGrid, n_seeds: int, rng_seed: int):
    """Positive Gaussian pairs with widths in [0.5, 4] and amplitudes in [0.1, 10]."""
    rng = np.random.default_rng(rng_seed)
    r = grid.nodes
    out = []
    for _ in range(n_seeds):
        widths = rng.uniform(0.5, 4.0, size=2)
        amps = rng.uniform(0.1, 10.0, size=2)
        X = amps[:, None] * np.exp(-(r[None, :] / widths[:, None]) ** 2)
        X[:, -1] = 0.0
        out.append(X)
    return out


def nonexistence_probe(prm: Params, n_seeds: int = 10, rng_seed: int = 0,
                       settings: SolverSettings | None = None, max_iter: int = 5000) -> ProbeResult:
    """Unconstrained gradient flow from random positive seeds.

    ALL_DECAYED when every trajectory's ``H`` norm drops below ``1e-6``.
    Otherwise the first surviving state and its identity record are returned.
    """
    settings = settings or SolverSettings()
    notes: list = []
    if not 1.0 < prm.p <= 2.0:
        _warn(notes, f"p={prm.p} outside (1, 2]; the trivial-solution criterion does not apply")
    else:
        thr = K.nonexist_threshold(prm.p, prm.lam)
        ratio = K.nonexist_ratio(prm.mu11, prm.mu22, prm.mu12)
        if not ratio > thr:
            _warn(notes, f"coupling ratio {ratio:.6g} not above threshold {thr:.6g}")
    grid = settings.grid()
    model = Model(grid, prm, settings.theta_nodes)
    opts = DescentOptions(max_iter=max_iter, tol=1e-9, energy_tol=1e-13, polish=False)

    def decayed(X, ev):
        return ev.integrals.A < DECAY_NORM**2

    norms = []
    survivor = rep = None
    for X0 in probe_seeds(grid, n_seeds, rng_seed):
        try:
            res = minimize(model, X0, None, opts, stop=decayed)
            X = res.X
        except SPNehariError as exc:
            X = exc.state if getattr(exc, "state", None) is not None else X0
        nrm = math.sqrt(model.integrals(X).A)
        norms.append(nrm)
        if nrm >= DECAY_NORM and survivor is None:
            survivor = PairFn.from_arrays(grid, X[0], X[1])
            rep = identity_report(survivor, prm, settings.theta_nodes, settings.identity_tol)
    status = ProbeStatus.ALL_DECAYED if survivor is None else ProbeStatus.SURVIVOR
    return ProbeResult(status, norms, survivor, rep, notes)


# -- two solutions -------------------------------------------------------------

def find_two_solutions(prm: Params, settings: SolverSettings | None = None):
    """Positive-energy and negative-energy vectorial solutions for ``1 < p < 2``.

    The second solution is a global radial minimizer obtained by
    unconstrained descent from the mixed pair built on the scalar
    negative-energy solution (or the best Gaussian pair if that is
    unavailable).

    Raises
    ------
    OrderingViolation
        The energies do not satisfy ``J2 < 0 < J1`` or the states coincide.
    """
    if not 1.0 < prm.p < 2.0:
        raise ConfigError(f"two-solution search needs 1 < p < 2, got p={prm.p}")
    settings = settings or SolverSettings()
    first = find_positive_solution(prm, settings)
    notes: list = []
    swapped = not prm.is_ordered
    work = prm.ordered()
    if work.det <= 0:
        _warn(notes, "det(mu) <= 0; the negative-energy solution is not guaranteed")
    grid = settings.grid()
    model = Model(grid, work, settings.theta_nodes)
    scalar = None
    seed = None
    try:
        scalar = solve_scalar(work, work.mu11, FiberingClass.PLUS, grid, settings.descent)
        seed = seed_pair(scalar.w, work).stack()
    except SPNehariError as exc:
        notes.append(f"scalar seed unavailable ({exc}); using Gaussian pair seed")
    if seed is None:
        s, _ = K.s_min_and_g(work.mu11, work.mu22, work.mu12)
        mix = np.sqrt([s, 1.0 - s])[:, None]
        seed = mix * gaussian_seed(_MixedModel(model, mix), FiberingClass.PLUS)[0]
    res = minimize(model, seed, None, settings.descent)
    second = _outcome(model, res.X, res, first.sobolev, settings, notes, scalar)
    if swapped:
        second = _unswap_outcome(second, prm)
    if not second.energy < 0 < first.energy:
        raise OrderingViolation(
            f"energies {second.energy:.6g}, {first.energy:.6g} violate J2 < 0 < J1")
    if not second.vectorial:
        raise SemitrivialCollapse("negative-energy solution collapsed", outcome=second)
    return first, second


# -- sweep ---------------------------------------------------------------------

SWEEP_COLUMNS = [
    "cell", "lambda", "p", "mu11", "mu22", "mu12", "sobolev", "lambda0", "lambda0_bar",
    "d0_level", "nonexist_threshold", "nonexist_ratio",
    "solve_status", "energy", "norm", "classification", "nehari_residual", "pohozaev_residual",
    "certification", "probe_status", "error",
]

_AXES = ("lambda", "p", "mu11", "mu22", "mu12")


def sweep_cells(spec: dict):
    """Cartesian product of the axes in ``spec`` over the base parameters, in axis order."""
    base = dict(spec.get("base", {}))
    axes = spec.get("axes", {})
    for k in axes:
        if k not in _AXES:
            raise ConfigError(f"unknown sweep axis {k!r}")
    names = list(axes)
    cells = []
    for combo in itertools.product(*(axes[k] for k in names)):
        d = dict(base)
        d.update(zip(names, combo))
        cells.append(d)
    return cells


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _run_cell(args):
    idx, cell, settings, tasks, n_seeds, rng_seed = args
    row = dict.fromkeys(SWEEP_COLUMNS)
    row["cell"] = idx
    try:
        prm = Params.from_dict(cell)
        row.update({"lambda": prm.lam, "p": prm.p, "mu11": prm.mu11, "mu22": prm.mu22,
                    "mu12": prm.mu12})
        S = settings.sobolev_constant(prm.ordered())
        row["sobolev"] = S
        row["lambda0"] = K.lambda0(prm.p, prm.lam, S)
        if prm.p >= 2.0:
            row["lambda0_bar"] = K.lambda0_bar(prm.p, prm.lam, S)
        row["d0_level"] = K.d0_level(prm.p, S)
        if prm.p <= 2.0:
            row["nonexist_threshold"] = K.nonexist_threshold(prm.p, prm.lam)
        row["nonexist_ratio"] = K.nonexist_ratio(prm.mu11, prm.mu22, prm.mu12)
    except SPNehariError as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
        return row
    errors = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        if "solve" in tasks:
            try:
                out = find_positive_solution(prm, settings)
                row.update(solve_status="OK", energy=out.energy, norm=out.norm,
                           classification=out.classification.value,
                           nehari_residual=out.nehari_residual,
                           pohozaev_residual=out.pohozaev_residual)
                if "certify" in tasks:
                    row["certification"] = certify_ground_state(out, prm, settings).status.value
            except SPNehariError as exc:
                row["solve_status"] = type(exc).__name__
                errors.append(str(exc))
        if "nonexist" in tasks:
            try:
                row["probe_status"] = nonexistence_probe(prm, n_seeds, rng_seed, settings).status.value
            except SPNehariError as exc:
                errors.append(str(exc))
    row["error"] = "; ".join(errors) or None
    return row


def sweep(spec: dict, settings: SolverSettings | None = None, threads: int = 1) -> str:
    """Run every cell of a parameter grid and return the report as CSV text.

    ``spec`` keys: ``base`` (parameter dict), ``axes`` (axis name to value
    list), ``tasks`` (subset of ``solve``, ``certify``, ``nonexist``),
    ``n_seeds`` and ``rng_seed`` for the probe. Rows follow cell order
    whatever the number of worker processes; per-cell failures are recorded
    in the ``error`` column.
    """
    settings = settings or SolverSettings()
    tasks = set(spec.get("tasks", ["solve", "certify"]))
    unknown = tasks - {"solve", "certify", "nonexist"}
    if unknown:
        raise ConfigError(f"unknown sweep tasks {sorted(unknown)}")
    cells = sweep_cells(spec)
    jobs = [(i, c, settings, tasks, int(spec.get("n_seeds", 10)), int(spec.get("rng_seed", 0)))
            for i, c in enumerate(cells)]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as ex:
            rows = list(ex.map(_run_cell, jobs))
    else:
        rows = [_run_cell(j) for j in jobs]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for row in rows:
        w.writerow([_fmt(row[c]) for c in SWEEP_COLUMNS])
    return buf.getvalue()
