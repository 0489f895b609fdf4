import json
import subprocess
import sys
from pathlib import Path

import pytest

from nnsym.cli import main
from nnsym.network import load, structurally_equal

FIX = Path(__file__).resolve().parent.parent / "fixtures"
pytestmark = pytest.mark.filterwarnings("ignore::RuntimeWarning")


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_validate_ok(capsys):
    code, out, _ = run(capsys, "validate", FIX / "fig3_n1.json")
    assert code == 0 and json.loads(out)["violations"] == []


def test_eval_text(capsys):
    code, out, _ = run(capsys, "eval", FIX / "fig3_n1.json", "--at", "1,0", "--format", "text")
    assert code == 0 and "0.5" in out


def test_reduce_writes_network_and_log(capsys, tmp_path):
    out_net, log = tmp_path / "r.json", tmp_path / "log.jsonl"
    code, _, _ = run(capsys, "reduce", FIX / "fig5_n.json", "--out", out_net, "--log", log)
    assert code == 0
    assert structurally_equal(load(out_net), load(FIX / "fig5_n_prime.json"), 1e-12)
    rec = [json.loads(x) for x in log.read_text().splitlines()]
    assert rec and rec[-1]["result-hash"] == load(out_net).content_hash()


def test_modify_and_invert(capsys, tmp_path):
    out_net = tmp_path / "m.json"
    code, _, _ = run(capsys, "modify", FIX / "fig3_n1.json", FIX / "fig3_plan1.json", "--out", out_net)
    assert code == 0
    code, out, _ = run(capsys, "invert", FIX / "fig3_n1.json", FIX / "fig3_plan1.json")
    assert code == 0 and "symmetry" in out


def test_iso_rho_chain(capsys):
    code, out, _ = run(capsys, "iso-rho", FIX / "fig3_n1.json", FIX / "fig3_n4.json")
    assert code == 0 and json.loads(out)["status"] == "isomorphic"


def test_iso_sign_mismatch_exit_1(capsys):
    code, _, _ = run(capsys, "iso-sign", FIX / "fig5_n.json", FIX / "fig5_n_prime.json")
    assert code == 1


def test_zero_probe(capsys):
    code, out, _ = run(capsys, "zero-probe", FIX / "crelu_zero_net.json")
    assert json.loads(out)["verdict"] == "zero-on-grid"


def test_poles_csv(capsys):
    code, out, _ = run(capsys, "poles", "--terms", "1,1,0", "--window", "10", "--format", "csv")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0].startswith("re,im") and len(lines) == 7


def test_cluster_and_density_from_file(capsys, tmp_path):
    cloud = tmp_path / "c.csv"
    cloud.write_text("re,im\n" + "".join(f"{k},0\n" for k in range(-100, 101)))
    code, out, _ = run(capsys, "density", cloud, "--line", "0,0,1,0", "--window", "100")
    assert code == 0 and abs(json.loads(out)["density"] - 1.005) < 1e-12
    code, out, _ = run(capsys, "cluster", cloud, "--eps", "0.4,0.2")
    assert code == 0 and json.loads(out)["depth"] == 1


def test_partition(capsys):
    code, out, _ = run(capsys, "partition", "--terms", "1,1,0;1,3,0;1,2,0")
    assert json.loads(out)["parts"] == [[0, 1], [2]]


def test_symmetry_commands(capsys, tmp_path):
    f = tmp_path / "s.json"
    f.write_text(json.dumps({"zeta": 0, "terms": [[1, 1, 0], [-0.5, 2, 0], [-0.5, 2, -1]]}))
    code, out, _ = run(capsys, "sym-verify", f, "--rho", "crelu")
    assert code == 0 and json.loads(out)["minimal"]
    code, out, _ = run(capsys, "sym-verify", f, "--rho", "tanh")
    assert code == 1
    code, out, _ = run(capsys, "sym-discover", "--candidates", "1,0;2,1")
    assert code == 1 and not json.loads(out)["found"]
    code, out, _ = run(capsys, "sym-exotic", "--alphas", "1,2")
    assert code == 0 and json.loads(out)["max_residual"] < 1e-6


def test_missing_file_exit_1(capsys, tmp_path):
    code, _, err = run(capsys, "validate", tmp_path / "nope.json")
    assert code == 1 and "nope.json" in err


def test_bad_json_exit_1(capsys, tmp_path):
    f = tmp_path / "bad.json"
    f.write_text("{not json")
    code, _, err = run(capsys, "validate", f)
    assert code == 1 and "bad.json" in err


def test_usage_error_exit_2():
    with pytest.raises(SystemExit) as e:
        main(["eval"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main(["validate", "x.json", "--grid", "0"])
    assert e.value.code == 2


def test_deterministic_subprocess():
    cmd = [sys.executable, "-m", "nnsym", "anchor-search", str(FIX / "anchor_adversarial.json"),
           "--input", "v2", "--seed", "7"]
    a = subprocess.run(cmd, capture_output=True)
    b = subprocess.run(cmd, capture_output=True)
    assert a.stdout == b.stdout and a.stdout
    assert a.returncode == 1 and json.loads(a.stdout)["exhausted"]
