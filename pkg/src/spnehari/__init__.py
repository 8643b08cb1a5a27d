"""Radial solver and verifier for a coupled Schrodinger-Poisson system.

    -Delta u + lam u + (mu11 phi_u - mu12 phi_v) u = F_u(u, v)
    -Delta v + lam v + (mu22 phi_v - mu12 phi_u) v = F_v(u, v)

with Hartree potentials ``phi_w = |x|^-1 * w^2`` and ``F`` the partial
derivatives of the theta-averaged power ``|u + e^{i theta} v|^(p+1)/(p+1)``. States are radial and
discretized on a uniform grid of the ball of radius ``r_max``.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    BranchUnavailable,
    ConfigError,
    GridMismatch,
    InconsistentZ,
    NoConvergence,
    NoProjection,
    NotOnManifold,
    OrderingViolation,
    SemitrivialCollapse,
    SPNehariError,
)
from .functional import FiberingClass, Model, PairFn, Params  # noqa: E402
from .kernels import BACKEND  # noqa: E402
from .radial_grid import RadialFn, RadialGrid, make_grid  # noqa: E402

__all__ = [
    "__version__",
    "BACKEND",
    "BranchUnavailable",
    "ConfigError",
    "FiberingClass",
    "GridMismatch",
    "InconsistentZ",
    "Model",
    "NoConvergence",
    "NoProjection",
    "NotOnManifold",
    "OrderingViolation",
    "PairFn",
    "Params",
    "RadialFn",
    "RadialGrid",
    "SemitrivialCollapse",
    "SPNehariError",
    "make_grid",
]
