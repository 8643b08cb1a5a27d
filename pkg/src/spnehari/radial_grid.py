"""Radial discretization of R^3 for radially symmetric functions.

Nodes are ``r_i = i*h`` for ``i = 1..n`` with ``h = r_max/n``; the origin is
not a node. Integrals ``int_0^{r_max} f(r) r^2 dr`` use trapezoid weights on
``f r^2`` (the origin contributes nothing) with a third-order Gregory
correction at ``r_max``. The correction keeps polynomial moments exact while
leaving every interior weight equal to ``h r_i^2``, so no odd/even pattern
leaks into discrete Euler-Lagrange equations.

Gradients live on the cells ``[r_i, r_{i+1}]``: the difference quotient is
weighted by the exact shell volume. The cell ``[0, r_1]`` carries no gradient
(Neumann condition at the origin by reflection).
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, GridMismatch

__all__ = [
    "RadialGrid",
    "RadialFn",
    "make_grid",
    "integrate_ball",
    "h1_norm_sq",
    "grad_norm_sq",
    "l2_norm_sq",
    "write_csv",
    "read_csv",
]

FOUR_PI = 4.0 * np.pi
# Gregory end corrections (exact for cubics), applied at r_max only.
_GREGORY_END = (23.0 / 24.0, 7.0 / 6.0, 3.0 / 8.0)


@dataclass(frozen=True, eq=False)
class RadialGrid:
    """Uniform radial grid on ``(0, r_max]``.

    Attributes
    ----------
    r_max : float
        Outer radius.
    n : int
        Number of nodes.
    nodes : numpy.ndarray
        Strictly increasing radii, last one equal to ``r_max``.
    weights : numpy.ndarray
        Weights for ``int_0^{r_max} f(r) r^2 dr``.
    """

    r_max: float
    n: int
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    shell_volumes: np.ndarray = field(repr=False)

    @property
    def h(self) -> float:
        return self.r_max / self.n

    @property
    def mass(self) -> np.ndarray:
        """Diagonal of the ball mass matrix, ``4 pi * weights``."""
        return FOUR_PI * self.weights

    def __eq__(self, other):
        if not isinstance(other, RadialGrid):
            return NotImplemented
        return self.n == other.n and self.r_max == other.r_max

    def __hash__(self):
        return hash((self.r_max, self.n))

    def fn(self, values) -> "RadialFn":
        return RadialFn(self, values)

    def sample(self, func) -> "RadialFn":
        """Sample a callable ``func(r)`` at the nodes."""
        return RadialFn(self, func(self.nodes))


def make_grid(r_max: float = 40.0, n: int = 4000) -> RadialGrid:
    """Build a uniform radial grid with ``n`` nodes ending at ``r_max``."""
    if not np.isfinite(r_max) or r_max <= 0:
        raise ConfigError(f"r_max must be positive, got {r_max!r}")
    if int(n) != n or n < 16:
        raise ConfigError(f"node count must be an integer >= 16, got {n!r}")
    n = int(n)
    r_max = float(r_max)
    h = r_max / n
    nodes = h * np.arange(1, n + 1, dtype=float)
    nodes[-1] = r_max
    coef = np.ones(n)
    coef[-3:] = _GREGORY_END
    weights = h * coef * nodes**2
    edges = nodes**3
    shell_volumes = FOUR_PI * (edges[1:] - edges[:-1]) / 3.0
    for a in (nodes, weights, shell_volumes):
        a.setflags(write=False)
    return RadialGrid(r_max, n, nodes, weights, shell_volumes)


@dataclass(frozen=True, eq=False)
class RadialFn:
    """A real function sampled once per grid node."""

    grid: RadialGrid
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.shape != (self.grid.n,):
            raise ConfigError(
                f"expected {self.grid.n} samples, got shape {vals.shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise ConfigError("radial function has non-finite samples")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __mul__(self, c):
        return RadialFn(self.grid, self.values * float(c))

    __rmul__ = __mul__

    def __add__(self, other):
        _check_same_grid(self, other)
        return RadialFn(self.grid, self.values + other.values)

    def __sub__(self, other):
        _check_same_grid(self, other)
        return RadialFn(self.grid, self.values - other.values)

    def __neg__(self):
        return RadialFn(self.grid, -self.values)


def _check_same_grid(a: RadialFn, b: RadialFn) -> None:
    if a.grid != b.grid:
        raise GridMismatch(f"grids differ: {a.grid!r} vs {b.grid!r}")


def integrate_ball(f: RadialFn) -> float:
    """Integral of a radial function over the ball of radius ``r_max``."""
    return float(FOUR_PI * np.dot(f.grid.weights, f.values))


def grad_norm_sq_array(grid: RadialGrid, values: np.ndarray) -> float:
    d = np.diff(values) / grid.h
    return float(np.dot(d * d, grid.shell_volumes))


def grad_norm_sq(f: RadialFn) -> float:
    """``int |grad f|^2 dx`` over the ball."""
    return grad_norm_sq_array(f.grid, f.values)


def l2_norm_sq(f: RadialFn) -> float:
    return float(np.dot(f.grid.mass, f.values * f.values))


def h1_norm_sq(f: RadialFn, lam: float) -> float:
    """``int |grad f|^2 + lam f^2 dx``."""
    if not lam > 0:
        raise ConfigError(f"lambda must be positive, got {lam!r}")
    return grad_norm_sq(f) + lam * l2_norm_sq(f)


def stiffness_apply(grid: RadialGrid, values: np.ndarray) -> np.ndarray:
    """Gradient of ``grad_norm_sq`` halved, i.e. the stiffness matrix times ``values``.

    Dividing by ``grid.mass`` gives the discrete ``-Laplacian``.
    """
    flux = grid.shell_volumes * np.diff(values) / grid.h**2
    out = np.zeros_like(values)
    out[:-1] -= flux
    out[1:] += flux
    return out


def stiffness_bands(grid: RadialGrid):
    """Diagonal and off-diagonal of the (symmetric, tridiagonal) stiffness matrix."""
    c = grid.shell_volumes / grid.h**2
    diag = np.zeros(grid.n)
    diag[:-1] += c
    diag[1:] += c
    return diag, -c


# -- CSV persistence -------------------------------------------------------

def write_csv(f: RadialFn, path) -> None:
    """Write ``r,value`` rows with 17 significant digits."""
    buf = io.StringIO()
    buf.write("r,value\n")
    for r, v in zip(f.grid.nodes, f.values):
        buf.write(f"{r:.17g},{v:.17g}\n")
    Path(path).write_text(buf.getvalue())


def read_csv(path, grid: RadialGrid | None = None) -> RadialFn:
    """Read a function written by :func:`write_csv`.

    The grid is reconstructed from the last radius and the row count unless
    one is supplied, in which case the radii must match it.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if [h.strip() for h in header] != ["r", "value"]:
            raise ConfigError(f"{path}: expected header 'r,value', got {header}")
        rows = [(float(a), float(b)) for a, b in reader]
    r = np.array([a for a, _ in rows])
    vals = np.array([b for _, b in rows])
    if grid is None:
        grid = make_grid(r[-1], len(r))
    if grid.n != len(r) or not np.allclose(r, grid.nodes, rtol=1e-14, atol=0):
        raise GridMismatch(f"{path}: radii do not match grid {grid!r}")
    return RadialFn(grid, vals)
