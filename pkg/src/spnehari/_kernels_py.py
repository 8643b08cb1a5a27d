"""NumPy implementation of the hot kernels (fallback for the compiled core)."""
import numpy as np


def half_nodes(m):
    """Distinct cosines of the m-node periodic rule and their weights (sum 1)."""
    k = np.arange(m // 2 + 1)
    c = np.cos(2.0 * np.pi * k / m)
    wt = np.full(k.shape, 2.0 / m)
    wt[0] = wt[-1] = 1.0 / m
    return c, wt


def theta_fields(a, b, p, m):
    """Periodic-trapezoid theta averages at every node.

    Returns ``(P, Fa, Fb)`` with ``P = <X^{(p+1)/2}>``,
    ``Fa = <X^{(p-1)/2} (a + b cos)>``, ``Fb = <X^{(p-1)/2} (b + a cos)>`` and
    ``X = a^2 + 2ab cos + b^2``.
    """
    a = np.ascontiguousarray(a, dtype=float)
    b = np.ascontiguousarray(b, dtype=float)
    c, wt = half_nodes(m)
    ab = (a * b)[:, None]
    x = (a * a + b * b)[:, None] + 2.0 * ab * c[None, :]
    np.maximum(x, 0.0, out=x)
    y = x ** (0.5 * (p - 1.0))
    P = (x * y) @ wt
    yw = y * wt[None, :]
    s0 = yw.sum(axis=1)
    s1 = yw @ c
    Fa = a * s0 + b * s1
    Fb = b * s0 + a * s1
    return P, Fa, Fb


def theta_power(a, b, p, m):
    a = np.ascontiguousarray(a, dtype=float)
    b = np.ascontiguousarray(b, dtype=float)
    c, wt = half_nodes(m)
    x = (a * a + b * b)[:, None] + 2.0 * (a * b)[:, None] * c[None, :]
    np.maximum(x, 0.0, out=x)
    return (x ** (0.5 * (p + 1.0))) @ wt
