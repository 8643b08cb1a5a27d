import json
import warnings
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from spnehari import make_grid

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ORACLES = json.loads((Path(__file__).parent / "oracles" / "frozen.json").read_text())

# acceptance lines collected by test_acceptance.py, printed in the summary
ACCEPTANCE_LINES: list = []


@pytest.fixture(scope="session")
def oracles():
    return ORACLES


@pytest.fixture(scope="session")
def grid():
    return make_grid(40.0, 4000)


@pytest.fixture(scope="session")
def small_grid():
    return make_grid(20.0, 400)


@pytest.fixture(autouse=True)
def _quiet_runtime_warnings():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        yield


def smooth_profile(rng, r, k=3):
    """Random positive mixture of Gaussians vanishing at r[-1]."""
    out = np.zeros_like(r)
    for _ in range(k):
        out += rng.uniform(0.2, 2.0) * np.exp(-(r / rng.uniform(0.6, 3.0)) ** 2)
    out[-1] = 0.0
    return out


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
