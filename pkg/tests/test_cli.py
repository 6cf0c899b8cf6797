import json
import subprocess
import sys
from pathlib import Path

import pytest

from dynkc.cli import CSV_COLUMNS, main

DATA = Path(__file__).parent / "data"
STREAM = DATA / "golden_stream.txt"


def run_cli(*args, env=None):
    return subprocess.run([sys.executable, "-m", "dynkc", *args], capture_output=True,
                          text=True, env=env)


@pytest.mark.parametrize("algo", ["combined", "kcenter"])
def test_golden_replay(tmp_path, algo):
    out = tmp_path / "m.csv"
    assert main(["run", str(STREAM), "--algo", algo, "--k", "2", "--oracle",
                 "--metrics", str(out)]) == 0
    assert out.read_bytes() == (DATA / f"golden_{algo}.csv").read_bytes()


def test_gen_is_reproducible(tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    for f in (a, b):
        assert main(["gen", "--strategy", "oblivious_random", "--n-init", "50",
                     "--n-updates", "200", "--seed", "7", "--dim", "2", "-o", str(f)]) == 0
    assert a.read_text() == b.read_text()
    events = [ln for ln in a.read_text().splitlines() if ln and not ln.startswith("#")]
    assert len(events) == 250


def test_gen_adaptive_hits_centers(tmp_path):
    f = tmp_path / "s.txt"
    assert main(["gen", "--strategy", "adaptive_delete_center", "--algo", "kcenter", "--k", "2",
                 "--n-init", "20", "--n-updates", "30", "--dim", "2", "-o", str(f)]) == 0
    from dynkc.metric import MetricSpace
    from dynkc.params import Params
    from dynkc.registry import make_algo
    from dynkc.stream import read_stream
    alg = make_algo("kcenter", MetricSpace.euclidean(2), Params(k=2))
    for ev in read_stream(f.read_text()).events:
        if ev.op == "-":
            assert ev.id in alg.solution()
        alg.apply(ev)


def test_gen_adaptive_needs_algo():
    assert main(["gen", "--strategy", "churn", "--dim", "2"]) == 2


def test_missing_dim_is_usage_error():
    with pytest.raises(SystemExit) as e:
        main(["gen", "--strategy", "oblivious_random"])
    assert e.value.code == 2


def test_unknown_suite_is_usage_error():
    with pytest.raises(SystemExit) as e:
        main(["verify", "no-such-suite"])
    assert e.value.code == 2


def test_bad_params_exit_2(tmp_path):
    assert main(["run", str(STREAM), "--algo", "bicr-merged", "--k", "2", "--eps", "0.9",
                 "--metrics", str(tmp_path / "x.csv")]) == 2
    assert main(["run", str(tmp_path / "missing.txt"), "--algo", "kcenter", "--k", "2"]) == 2


def test_cost_every_zero_leaves_cost_blank(tmp_path):
    out = tmp_path / "m.csv"
    assert main(["run", str(STREAM), "--algo", "bicr-rec", "--k", "2", "--cost-every", "0",
                 "--metrics", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].split(",") == CSV_COLUMNS
    for ln in lines[1:]:
        f = ln.split(",")
        assert f[6] == f[7] == f[8] == f[9] == ""


def test_replay_twice_identical(tmp_path):
    outs = []
    for i in range(2):
        out = tmp_path / f"{i}.csv"
        main(["run", str(STREAM), "--algo", "bicr-merged", "--k", "2", "--alpha", "0.3",
              "--seed", "3", "--metrics", str(out)])
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_env_seed_overrides(tmp_path, monkeypatch):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    main(["gen", "--dim", "2", "--seed", "99", "-o", str(a)])
    monkeypatch.setenv("DYNKC_SEED", "99")
    main(["gen", "--dim", "2", "--seed", "1", "-o", str(b)])
    assert a.read_text() == b.read_text()
    monkeypatch.setenv("DYNKC_SEED", "x")
    assert main(["gen", "--dim", "2"]) == 2


def test_verify_json_and_exit_code(tmp_path):
    out = tmp_path / "r.json"
    r = run_cli("verify", "oracle-equivalence", "--n", "12", "--k", "2", "--trials", "20",
                "--json", str(out))
    assert r.returncode == 0, r.stderr
    rep = json.loads(out.read_text())
    assert rep["ok"] and rep["suite"] == "oracle-equivalence"
