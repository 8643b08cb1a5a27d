import importlib
import os
import subprocess
import sys

import numpy as np
import pytest

from spnehari import _kernels_py, kernels


def test_backend_reported():
    assert kernels.BACKEND in ("cython", "python")


@pytest.mark.skipif(kernels.BACKEND != "cython", reason="compiled core not built")
@pytest.mark.parametrize("p", [1.3, 2.0, 2.2, 2.9])
@pytest.mark.parametrize("m", [16, 128])
def test_parity_with_fallback(p, m):
    from spnehari import _kernels
    rng = np.random.default_rng(int(p * 10) + m)
    a = rng.uniform(-2, 2, 500)
    b = rng.uniform(-2, 2, 500)
    a[:5] = b[:5]  # cusp nodes
    a[5:10] = 0.0
    for fc, fp in zip(_kernels.theta_fields(a, b, p, m), _kernels_py.theta_fields(a, b, p, m)):
        np.testing.assert_allclose(fc, fp, rtol=1e-12, atol=1e-14)
    np.testing.assert_allclose(_kernels.theta_power(a, b, p, m), _kernels_py.theta_power(a, b, p, m),
                               rtol=1e-12, atol=1e-14)


def test_env_forces_fallback():
    code = "from spnehari import kernels; print(kernels.BACKEND)"
    env = dict(os.environ, SPNEHARI_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == "python"
