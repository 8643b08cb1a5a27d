import json

import numpy as np
import pytest

from spnehari.cli import RunConfig, load_state, main, save_state
from spnehari.errors import ConfigError
from spnehari.functional import PairFn, Params
from spnehari.radial_grid import make_grid


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_constants_command(capsys):
    code, out, _ = run(capsys, "constants", "--p", "2", "--lambda", "1", "--sobolev", "1")
    assert code == 0
    d = json.loads(out)
    assert d["lambda0"] == pytest.approx(3 * np.sqrt(3) * np.pi / 64, rel=1e-12)
    assert d["sobolev"] == 1.0 and d["sobolev_source"] == "override"


def test_invalid_p_exit_2(capsys):
    code, _, err = run(capsys, "solve", "--p", "3.5", "--mu11", "1", "--mu22", "1", "--mu12", "1")
    assert code == 2 and "p must lie" in err


def test_usage_errors(capsys):
    assert run(capsys, "nope")[0] == 2
    assert run(capsys, "solve", "--p", "2")[0] == 2  # missing couplings
    assert run(capsys, "solve", "--p", "2", "--mu11", "1")[0] == 2
    assert run(capsys, "solve", "--threads", "0")[0] == 2


def test_solver_failure_exit_1(capsys):
    code, _, err = run(capsys, "scalar", "--p", "2.5", "--mu", "0.05", "--branch", "plus")
    assert code == 1 and "BranchUnavailable" in err


def test_verify_zero_state(tmp_path, capsys):
    g = make_grid(10.0, 100)
    side = save_state(PairFn.zeros(g), Params(1.0, 2.0, 1.0, 1.0, 1.0), tmp_path / "zero")
    code, out, _ = run(capsys, "verify", str(side))
    assert code == 0
    d = json.loads(out)["identities"]
    assert d["nehari_residual"] == 0.0 and d["pohozaev_residual"] == 0.0


def test_state_round_trip(tmp_path):
    g = make_grid(10.0, 100)
    st_ = PairFn.from_arrays(g, np.exp(-g.nodes), np.exp(-2 * g.nodes))
    prm = Params(1.0, 2.0, 0.5, 0.25, 0.125)
    save_state(st_, prm, tmp_path / "s")
    back, prm2 = load_state(tmp_path / "s")
    assert prm2 == prm
    assert np.array_equal(back.u.values, st_.u.values)
    with pytest.raises(ConfigError):
        load_state(tmp_path / "missing")


def test_config_round_trip():
    cfg = RunConfig(Params(1.0, 2.2, 0.1, 0.2, 0.05), r_max=30.0, n=1000, rng_seed=5,
                    sobolev_override=2.5, output_dir="x")
    again = RunConfig.from_json(cfg.to_json())
    assert again == cfg
    assert RunConfig.from_json(again.to_json()).to_json() == cfg.to_json()
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"bogus": 1})
    with pytest.raises(ConfigError):
        RunConfig(n=1)


def test_solve_writes_manifest(tmp_path, capsys):
    out = tmp_path / "run"
    code, text, _ = run(capsys, "certify", "--p", "2.2", "--mu11", "0.00156", "--mu22", "0.00156",
                        "--mu12", "0.00125", "--n", "1500", "--out", str(out))
    assert code == 0
    res = json.loads(text)
    assert res["certification"]["status"] == "CERTIFIED"
    man = json.loads((out / "manifest.json").read_text())
    assert man["status"] == "ok" and "wall_time_s" in man
    assert set(man["files"]) >= {"solution.json", "result.json"}
    # the manifest config reproduces the run
    cfg = RunConfig.from_dict(man["config"])
    assert cfg.params == Params(1.0, 2.2, 0.00156, 0.00156, 0.00125)
    state, prm = load_state(out / "solution.json")
    code, text2, _ = run(capsys, "verify", str(out / "solution.json"))
    assert json.loads(text2)["identities"]["nehari_residual"] < 1e-8


def test_config_file(tmp_path, capsys):
    cfg = RunConfig(Params(1.0, 2.0, 0.5, 0.5, 0.1), sobolev_override=1.0)
    path = tmp_path / "cfg.json"
    path.write_text(cfg.to_json())
    code, out, _ = run(capsys, "constants", "--config", str(path), "--p", "2")
    assert code == 0
    d = json.loads(out)
    assert d["s_min"] == 0.5 and d["sobolev"] == 1.0
