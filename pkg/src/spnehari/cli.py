"""Command-line interface, run configuration and state persistence.

Exit codes: 0 on success, 1 when a solver fails, 2 for configuration or
usage errors. Results go to standard output as JSON (CSV for ``sweep``);
with ``--out DIR`` states, reports and a run manifest are written there too.
"""
from __future__ import annotations

import argparse
import json
import math
import platform
import sys
import time
import warnings
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from . import constants as K
from .angular import DEFAULT_M
from .descent import DescentOptions
from .driver import (
    SolverSettings,
    certify_ground_state,
    find_positive_solution,
    find_two_solutions,
    nonexistence_probe,
    sweep,
)
from .errors import ConfigError, SPNehariError
from .functional import PairFn, Params
from .identities import identity_report
from .kernels import BACKEND
from .radial_grid import make_grid, read_csv, write_csv
from .scalar_sp import solve_scalar

__all__ = ["RunConfig", "save_state", "load_state", "main"]

EXIT_OK, EXIT_SOLVER, EXIT_CONFIG = 0, 1, 2


@dataclass
class RunConfig:
    """Everything needed to reproduce a run."""

    params: Params | None = None
    r_max: float = 40.0
    n: int = 4000
    theta_nodes: int = DEFAULT_M
    tol: float = 1e-8
    identity_tol: float = 1e-3
    max_iter: int = 20000
    rng_seed: int = 0
    n_seeds: int = 10
    sobolev_override: float | None = None
    output_dir: str | None = None

    def __post_init__(self):
        self.validate()

    def validate(self):
        if not (math.isfinite(self.r_max) and self.r_max > 0):
            raise ConfigError(f"r_max must be positive, got {self.r_max}")
        if self.n < 3:
            raise ConfigError(f"n must be at least 3, got {self.n}")
        if self.theta_nodes < 1:
            raise ConfigError(f"theta_nodes must be positive, got {self.theta_nodes}")
        for name in ("tol", "identity_tol"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.max_iter < 1 or self.n_seeds < 1:
            raise ConfigError("max_iter and n_seeds must be positive")
        if self.sobolev_override is not None and not self.sobolev_override > 0:
            raise ConfigError("sobolev override must be positive")

    def settings(self) -> SolverSettings:
        return SolverSettings(self.r_max, self.n, self.theta_nodes, self.sobolev_override,
                              DescentOptions(max_iter=self.max_iter, tol=self.tol),
                              self.identity_tol)

    def to_dict(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d["params"] = self.params.as_dict() if self.params else None
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        d = dict(d)
        known = {f.name for f in fields(cls)}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config keys {sorted(extra)}")
        if d.get("params") is not None:
            try:
                d["params"] = Params.from_dict(d["params"])
            except KeyError as exc:
                raise ConfigError(f"missing parameter {exc}") from None
        return cls(**d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None


# -- state files -------------------------------------------------------------

def save_state(state: PairFn, prm: Params, stem) -> Path:
    """Write ``<stem>.u.csv``, ``<stem>.v.csv`` and the ``<stem>.json`` sidecar."""
    stem = Path(stem)
    stem.parent.mkdir(parents=True, exist_ok=True)
    write_csv(state.u, stem.with_name(stem.name + ".u.csv"))
    write_csv(state.v, stem.with_name(stem.name + ".v.csv"))
    side = {"grid": {"r_max": state.grid.r_max, "n": state.grid.n},
            "params": prm.as_dict(), "u": stem.name + ".u.csv", "v": stem.name + ".v.csv"}
    path = stem.with_name(stem.name + ".json")
    path.write_text(json.dumps(side, indent=2, sort_keys=True) + "\n")
    return path


def load_state(path):
    """Inverse of :func:`save_state`; ``path`` is the sidecar or the stem."""
    path = Path(path)
    if path.suffix != ".json":
        path = path.with_name(path.name + ".json")
    try:
        side = json.loads(path.read_text())
        grid = make_grid(side["grid"]["r_max"], side["grid"]["n"])
        prm = Params.from_dict(side["params"])
        u = read_csv(path.parent / side["u"], grid)
        v = read_csv(path.parent / side["v"], grid)
    except (OSError, KeyError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"cannot read state {path}: {exc}") from None
    return PairFn(u, v), prm


# -- output helpers ------------------------------------------------------------

def _clean(obj):
    """JSON-safe copy: enums to values, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    if isinstance(obj, (np.floating, np.integer)):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


def _dumps(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True)


def _outcome_dict(out) -> dict:
    return {"energy": out.energy, "norm": out.norm, "classification": out.classification,
            "fibering_class": out.fibering_class, "vectorial": out.vectorial,
            "positive": out.positive, "residual": out.residual, "iterations": out.iterations,
            "sobolev": out.sobolev, "identities": asdict(out.identity_report),
            "scalar_energy": out.scalar.energy if out.scalar else None, "notes": out.notes}


class _Run:
    """Collects files and the manifest of one invocation."""

    def __init__(self, command: str, cfg: RunConfig, argv):
        self.command, self.cfg, self.argv = command, cfg, list(argv)
        self.out = Path(cfg.output_dir) if cfg.output_dir else None
        self.files: list = []
        self.t0 = time.perf_counter()
        if self.out:
            self.out.mkdir(parents=True, exist_ok=True)

    def state(self, name, state, prm):
        if self.out:
            self.files.append(save_state(state, prm, self.out / name).name)

    def text(self, name, text):
        if self.out:
            (self.out / name).write_text(text)
            self.files.append(name)

    def finish(self, status: str):
        if not self.out:
            return
        manifest = {
            "command": self.command, "argv": self.argv, "status": status,
            "config": self.cfg.to_dict(), "files": self.files,
            "wall_time_s": time.perf_counter() - self.t0,
            "versions": {"spnehari": __version__, "python": platform.python_version(),
                         "numpy": np.__version__, "scipy": scipy.__version__,
                         "kernels": BACKEND},
        }
        (self.out / "manifest.json").write_text(_dumps(manifest) + "\n")


# -- subcommands ---------------------------------------------------------------

def _need_params(cfg: RunConfig) -> Params:
    if cfg.params is None:
        raise ConfigError("parameters --p, --lambda, --mu11, --mu22, --mu12 are required")
    return cfg.params


def cmd_solve(cfg, args, run):
    prm = _need_params(cfg)
    out = find_positive_solution(prm, cfg.settings())
    run.state("solution", out.state, prm)
    res = {"params": prm.as_dict(), "solution": _outcome_dict(out)}
    if args.command == "certify":
        cert = certify_ground_state(out, prm, cfg.settings())
        res["certification"] = {"status": cert.status, "reasons": cert.reasons,
                                "check": asdict(cert.check) if cert.check else None}
    return res


def cmd_nonexist(cfg, args, run):
    prm = _need_params(cfg)
    r = nonexistence_probe(prm, cfg.n_seeds, cfg.rng_seed, cfg.settings())
    if r.survivor is not None:
        run.state("survivor", r.survivor, prm)
    return {"params": prm.as_dict(), "status": r.status, "final_norms": r.final_norms,
            "survivor_report": asdict(r.survivor_report) if r.survivor_report else None,
            "notes": r.notes}


def cmd_two(cfg, args, run):
    prm = _need_params(cfg)
    first, second = find_two_solutions(prm, cfg.settings())
    run.state("first", first.state, prm)
    run.state("second", second.state, prm)
    return {"params": prm.as_dict(), "first": _outcome_dict(first),
            "second": _outcome_dict(second)}


def cmd_scalar(cfg, args, run):
    if args.mu is None or args.p is None:
        raise ConfigError("scalar needs --p and --mu")
    prm = Params(args.lam, args.p, args.mu, args.mu, args.mu)
    res = solve_scalar(prm, args.mu, args.branch, make_grid(cfg.r_max, cfg.n),
                       DescentOptions(max_iter=cfg.max_iter, tol=cfg.tol))
    if run.out:
        write_csv(res.w, run.out / "scalar.csv")
        run.files.append("scalar.csv")
    return {"p": prm.p, "lambda": prm.lam, "mu": args.mu, "branch": args.branch.upper(),
            "energy": res.energy, "nehari_class": res.nehari_class, "h1_norm": res.h1_norm,
            "nehari_residual": res.nehari_residual, "residual_norm": res.residual_norm,
            "iterations": res.iterations}


def cmd_constants(cfg, args, run):
    if args.p is None:
        raise ConfigError("constants needs --p")
    Params(args.lam, args.p, 1.0, 1.0, 1.0)  # range checks only
    S = K.sobolev_constant(args.p, args.lam, cfg.sobolev_override, cfg.r_max, cfg.n)
    mu = None
    if cfg.params is not None:
        mu = (cfg.params.mu11, cfg.params.mu22, cfg.params.mu12)
    d = K.bundle(args.p, args.lam, S, mu).as_dict()
    d["sobolev_source"] = "override" if cfg.sobolev_override is not None else "computed"
    return d


def cmd_verify(cfg, args, run):
    state, prm = load_state(args.state_file)
    rep = identity_report(state, prm, cfg.theta_nodes, cfg.identity_tol)
    return {"params": prm.as_dict(), "identities": asdict(rep)}


def cmd_sweep(cfg, args, run):
    try:
        spec = json.loads(Path(args.grid_file).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read sweep grid: {exc}") from None
    if "config" in spec:
        cfg = RunConfig.from_dict({**spec.pop("config"), "output_dir": cfg.output_dir})
        run.cfg = cfg
    text = sweep(spec, cfg.settings(), args.threads)
    run.text("sweep.csv", text)
    return text


_COMMANDS = {
    "solve": cmd_solve, "certify": cmd_solve, "nonexist": cmd_nonexist,
    "two-solutions": cmd_two, "scalar": cmd_scalar, "constants": cmd_constants,
    "verify": cmd_verify, "sweep": cmd_sweep,
}


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration; flags override it")
    g = common.add_argument_group("parameters")
    g.add_argument("--p", type=float)
    g.add_argument("--lambda", dest="lam", type=float, default=None)
    for name in ("mu11", "mu22", "mu12"):
        g.add_argument(f"--{name}", type=float)
    n = common.add_argument_group("numerics")
    n.add_argument("--r-max", type=float)
    n.add_argument("--n", type=int)
    n.add_argument("--theta-nodes", type=int)
    n.add_argument("--tol", type=float)
    n.add_argument("--max-iter", type=int)
    n.add_argument("--sobolev", type=float, help="override the embedding constant S")
    n.add_argument("--seed", dest="rng_seed", type=int)
    n.add_argument("--n-seeds", type=int)
    common.add_argument("--out", help="directory for states, reports and the manifest")
    common.add_argument("--threads", type=int, default=1)

    ap = argparse.ArgumentParser(prog="spnehari",
                                 description="Positive solutions of a coupled Schrodinger-Poisson system")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("solve", parents=[common], help="positive vectorial solution")
    sub.add_parser("certify", parents=[common], help="solve and certify a ground state")
    sub.add_parser("nonexist", parents=[common], help="gradient-flow nonexistence probe")
    sub.add_parser("two-solutions", parents=[common], help="two solutions for 1 < p < 2")
    sc = sub.add_parser("scalar", parents=[common], help="scalar equation, one branch")
    sc.add_argument("--mu", type=float)
    sc.add_argument("--branch", default="MINUS", type=str.upper, choices=["MINUS", "PLUS"])
    sub.add_parser("constants", parents=[common], help="threshold constants as JSON")
    v = sub.add_parser("verify", parents=[common], help="identity residuals of a saved state")
    v.add_argument("state_file")
    s = sub.add_parser("sweep", parents=[common], help="parameter sweep to CSV")
    s.add_argument("grid_file")
    return ap


def build_config(args) -> RunConfig:
    base = {}
    if args.config:
        try:
            base = RunConfig.from_json(Path(args.config).read_text()).to_dict()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
    for key in ("r_max", "n", "theta_nodes", "tol", "max_iter", "rng_seed", "n_seeds"):
        val = getattr(args, key)
        if val is not None:
            base[key] = val
    if args.sobolev is not None:
        base["sobolev_override"] = args.sobolev
    if args.out is not None:
        base["output_dir"] = args.out
    prm = dict(base.get("params") or {})
    if args.lam is None:
        args.lam = prm.get("lambda", 1.0)
    flags = {"lambda": args.lam, "p": args.p, "mu11": args.mu11, "mu22": args.mu22,
             "mu12": args.mu12}
    prm.update({k: v for k, v in flags.items() if v is not None})
    if args.p is None and "p" in prm:
        args.p = prm["p"]
    mus = [prm.get(k) for k in ("mu11", "mu22", "mu12")]
    if "p" in prm and all(m is not None for m in mus):
        base["params"] = prm
    elif any(m is not None for m in mus) and args.command != "scalar":
        raise ConfigError("give all of --mu11, --mu22, --mu12 or none")
    else:
        base["params"] = None
    return RunConfig.from_dict(base)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    ap = _parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    run = None
    try:
        if args.threads < 1:
            raise ConfigError("--threads must be positive")
        cfg = build_config(args)
        run = _Run(args.command, cfg, argv)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            result = _COMMANDS[args.command](cfg, args, run)
    except ConfigError as exc:
        print(f"spnehari: configuration error: {exc}", file=sys.stderr)
        if run:
            run.finish("config_error")
        return EXIT_CONFIG
    except SPNehariError as exc:
        print(f"spnehari: {type(exc).__name__}: {exc}", file=sys.stderr)
        if run:
            run.finish(type(exc).__name__)
        return EXIT_SOLVER
    if isinstance(result, str):
        sys.stdout.write(result)
    else:
        text = _dumps(result)
        print(text)
        run.text("result.json", text + "\n")
    run.finish("ok")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
