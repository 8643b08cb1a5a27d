import csv
import io

import numpy as np
import pytest

from spnehari import constants as K
from spnehari.driver import (
    SWEEP_COLUMNS,
    CertifyStatus,
    ProbeStatus,
    SolverSettings,
    certify_ground_state,
    find_positive_solution,
    find_two_solutions,
    nonexistence_probe,
    probe_seeds,
    sweep,
)
from spnehari.errors import ConfigError
from spnehari.functional import Params
from spnehari.manifold import Sublevel

FAST = SolverSettings(r_max=40.0, n=1500)
CERT_MU = (0.00156, 0.00156, 0.00125)


@pytest.fixture(scope="module")
def cert_outcome():
    prm = Params(1.0, 2.2, *CERT_MU)
    return prm, find_positive_solution(prm, FAST)


def test_positive_solution(cert_outcome):
    prm, out = cert_outcome
    assert out.energy > 0 and out.vectorial and out.positive
    assert out.nehari_residual < 1e-8
    assert out.classification == Sublevel.M1
    assert out.energy < out.scalar.energy
    # every returned solution passes the identity checks
    assert out.pohozaev_residual < 1e-3


def test_certify(cert_outcome):
    prm, out = cert_outcome
    cert = certify_ground_state(out, prm, FAST)
    assert cert.status == CertifyStatus.CERTIFIED, cert.reasons
    chk = cert.check
    assert chk.feasible and chk.w_below_c1_bound and chk.decomp.w > 0
    p, th = prm.p, chk.decomp.theta
    assert th >= (p - 1) / (5 - p) * out.identity_report.z[1] > 0
    st_ = chk.decomp.s + chk.decomp.t
    assert 0 < st_ < 4 * (p + 1) * th / (3 - p)


def test_certify_gates(cert_outcome):
    _, out = cert_outcome
    assert certify_ground_state(out, Params(1.0, 1.8, *CERT_MU)).status == CertifyStatus.NOT_APPLICABLE
    # spec example mu: above Lambda0 for the computed S
    big = Params(1.0, 2.2, 0.05, 0.05, 0.04)
    assert certify_ground_state(out, big).status == CertifyStatus.NOT_APPLICABLE
    neg_det = Params(1.0, 2.2, 0.001, 0.001, 0.0015)
    assert certify_ground_state(out, neg_det).status == CertifyStatus.NOT_APPLICABLE
    # p = 2.5: Lambda0_bar is infinite, so only Lambda0 and det gate
    S = K.sobolev_constant(2.5, 1.0)
    assert K.lambda0_bar(2.5, 1.0, S) == float("inf")


def test_unordered_mu_swaps_back():
    a = find_positive_solution(Params(1.0, 2.2, 0.0015, 0.0012, 0.001), FAST)
    b = find_positive_solution(Params(1.0, 2.2, 0.0012, 0.0015, 0.001), FAST)
    assert a.energy == pytest.approx(b.energy, rel=1e-9)
    np.testing.assert_allclose(a.state.u.values, b.state.v.values, rtol=1e-6, atol=1e-9)


def test_probe_seeds_reproducible():
    g = FAST.grid()
    s1, s2 = probe_seeds(g, 4, 7), probe_seeds(g, 4, 7)
    assert all(np.array_equal(a, b) for a, b in zip(s1, s2))
    assert all(np.all(s >= 0) for s in s1)


def test_probe_small():
    prm = Params(1.0, 2.0, 10.0, 10.0, 1.0)
    r = nonexistence_probe(prm, n_seeds=2, settings=SolverSettings(r_max=20.0, n=400))
    assert r.status == ProbeStatus.ALL_DECAYED
    assert all(n < 1e-6 for n in r.final_norms)


def test_two_solutions_needs_p_below_2():
    with pytest.raises(ConfigError):
        find_two_solutions(Params(1.0, 2.5, 0.01, 0.01, 0.01))


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_sweep_plumbing():
    assert sweep({"base": {"lambda": 1, "p": 2.2, "mu11": 1e-3, "mu22": 1e-3, "mu12": 5e-4},
                  "axes": {"p": []}}, FAST) == ",".join(SWEEP_COLUMNS) + "\n"
    spec = {"base": {"lambda": 1, "p": 2.2, "mu11": 1.5e-3, "mu22": 1.5e-3, "mu12": 1e-3},
            "axes": {"p": [2.2, 2.5], "mu22": [1.5e-3, 1.6e-3]}, "tasks": ["solve", "certify"]}
    out = rows(sweep(spec, FAST))
    assert len(out) == 4
    assert [r["cell"] for r in out] == ["0", "1", "2", "3"]
    for r in out:
        assert not (r["certification"] == "CERTIFIED" and r["probe_status"] == "ALL_DECAYED")


def test_sweep_records_errors():
    spec = {"base": {"lambda": 1, "p": 2.2, "mu11": 1e-3, "mu22": 1e-3, "mu12": 5e-4},
            "axes": {"p": [3.5]}}
    out = rows(sweep(spec, FAST))
    assert out[0]["error"].startswith("ConfigError")
    with pytest.raises(ConfigError):
        sweep({"axes": {"nu": [1]}}, FAST)
