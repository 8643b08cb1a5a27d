"""Newtonian potential of a radial density and the pairing energies built on it.

For radial ``w`` the potential ``phi(x) = int w(y)^2 / |x - y| dy`` reduces to

    phi(r) = 4 pi [ (1/r) int_0^r s^2 w^2 ds + int_r^inf s w^2 ds ],

i.e. the shell kernel ``1/max(r, s)``. The discrete potential applies this
kernel to the grid charges ``q_j = mass_j w_j^2``, so the discrete Hartree
energy is the quadratic form ``q^T K q`` with ``K_ij = 1/max(r_i, r_j)``.
``K`` is a sum of rank-one positive terms, which keeps every pairing
inequality of the continuous problem exact on the grid.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .radial_grid import RadialFn, RadialGrid, _check_same_grid

__all__ = ["HartreePotential", "hartree_potential", "hartree_pairing", "potential_array"]


@dataclass(frozen=True)
class HartreePotential:
    phi: RadialFn

    @property
    def values(self) -> np.ndarray:
        return self.phi.values


def potential_array(grid: RadialGrid, w: np.ndarray) -> np.ndarray:
    """Potential of ``w^2`` sampled at the nodes, O(n) via prefix sums."""
    q = grid.mass * (w * w)
    r = grid.nodes
    inner = np.cumsum(q) / r
    tail = np.cumsum((q / r)[::-1])[::-1]
    outer = np.empty_like(tail)
    outer[:-1] = tail[1:]
    outer[-1] = 0.0
    return inner + outer


def hartree_potential(w: RadialFn) -> HartreePotential:
    return HartreePotential(RadialFn(w.grid, potential_array(w.grid, w.values)))


def hartree_pairing(w1: RadialFn, w2: RadialFn) -> float:
    """``int phi_{w1} w2^2 dx``; symmetric in its arguments."""
    _check_same_grid(w1, w2)
    phi = potential_array(w1.grid, w1.values)
    return float(np.dot(w1.grid.mass, phi * w2.values**2))
