"""Compiled theta kernel against the NumPy fallback.

    python3 benchmarks/bench_kernels.py [--n 4000] [--m 128] [--repeat 20]

Prints the best-of-``repeat`` time for one evaluation of ``theta_fields``
(the hot kernel of every energy/gradient evaluation) at grid size ``n``,
plus one full functional evaluation with each backend, and the largest
relative difference between the two.
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from spnehari import _kernels_py

try:
    from spnehari import _kernels
except ImportError:
    _kernels = None

_MODEL_SNIPPET = """
import numpy as np, timeit
from spnehari import make_grid, Model, Params, kernels
g = make_grid(40.0, {n})
m = Model(g, Params(1.0, 2.2, 0.1, 0.2, 0.05), theta_nodes={m})
X = np.vstack([np.exp(-g.nodes / 2), np.exp(-g.nodes / 3)])
t = min(timeit.repeat(lambda: m.evaluate(X), number=1, repeat={repeat}))
print(kernels.BACKEND, t)
"""


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=4000)
    ap.add_argument("--m", type=int, default=128)
    ap.add_argument("--p", type=float, default=2.2)
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    a = rng.uniform(0, 2, args.n)
    b = rng.uniform(0, 2, args.n)
    t_py = best(lambda: _kernels_py.theta_fields(a, b, args.p, args.m), args.repeat)
    print(f"theta_fields n={args.n} m={args.m}")
    print(f"  numpy fallback : {t_py * 1e3:8.3f} ms")
    if _kernels is None:
        print("  compiled core  : not built")
    else:
        t_c = best(lambda: _kernels.theta_fields(a, b, args.p, args.m), args.repeat)
        diff = max(np.max(np.abs(x - y) / np.maximum(np.abs(y), 1e-300))
                   for x, y in zip(_kernels.theta_fields(a, b, args.p, args.m),
                                   _kernels_py.theta_fields(a, b, args.p, args.m)))
        print(f"  compiled core  : {t_c * 1e3:8.3f} ms  (speedup {t_py / t_c:.1f}x, "
              f"max rel diff {diff:.1e})")

    print("full Model.evaluate (energy + gradient)")
    code = _MODEL_SNIPPET.format(n=args.n, m=args.m, repeat=args.repeat)
    for force in ("1", "0"):
        env = dict(os.environ, SPNEHARI_PURE_PYTHON=force)
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
        backend, t = out.stdout.split()
        print(f"  {backend:14s} : {float(t) * 1e3:8.3f} ms")


if __name__ == "__main__":
    main()
