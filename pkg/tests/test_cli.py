import json
import subprocess
import sys

import pytest

from spherical_hecke.cli import EXIT_CHECK, EXIT_COMPUTE, EXIT_OK, EXIT_USAGE, run_command
from spherical_hecke.config import CACHE_ENV


@pytest.fixture(autouse=True)
def isolated_cache(monkeypatch, tmp_path):
    monkeypatch.setenv(CACHE_ENV, str(tmp_path / "cache"))
    return tmp_path / "cache"


def run(capsys, *argv):
    code = run_command(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_satake_three_terms(capsys, isolated_cache):
    code, out, _ = run(capsys, "satake", "--n", "2", "--p", "3", "--lambda", "1,-1")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["config"]["p"] == 3 and "version" in doc
    terms = doc["result"]["terms"]
    assert len(terms) == 3
    assert [t["t"] for t in terms] == [[-1, 1], [0, 0], [1, -1]]
    assert [(t["re"], t["p_half_power"]) for t in terms] == [("1", 2), ("2", 0), ("1", 2)]
    assert len(list(isolated_cache.glob("*.json"))) == 1
    code, again, _ = run(capsys, "satake", "--p", "3", "--lambda", "1,-1")
    assert json.loads(again)["result"] == doc["result"]


def test_satake_rank_mismatch(capsys):
    code, _, err = run(capsys, "satake", "--n", "3", "--p", "3", "--lambda", "1,-1")
    assert code == EXIT_USAGE and "coordinates" in err


def test_unknown_flag_exits_2(capsys):
    with pytest.raises(SystemExit) as info:
        run_command(["satake", "--p", "2", "--lambda", "1,-1", "--bogus"])
    assert info.value.code == EXIT_USAGE
    assert "usage:" in capsys.readouterr().err


def test_invalid_prime(capsys):
    code, _, err = run(capsys, "satake", "--p", "4", "--lambda", "1,-1")
    assert code == EXIT_USAGE and "prime" in err


def test_budget_exceeded_is_compute_failure(capsys):
    code, _, err = run(capsys, "satake", "--p", "2", "--lambda", "6,-6", "--no-cache")
    assert code == EXIT_COMPUTE and "budget" in err


def test_convolve(capsys):
    code, out, _ = run(capsys, "convolve", "--p", "2", "--lambda", "1,-1", "--mu", "1,-1")
    assert code == EXIT_OK
    res = json.loads(out)["result"]
    assert res["lambda"] == [1, -1] and res["mu"] == [1, -1]
    assert res["terms"] == [{"nu": [0, 0], "coeff": 6}, {"nu": [1, -1], "coeff": 1}, {"nu": [2, -2], "coeff": 1}]
    code, out, _ = run(capsys, "convolve", "--n", "3", "--p", "2", "--lambda", "1,0,-1", "--mu", "1,1,-2")
    assert code == EXIT_OK
    terms = {tuple(t["nu"]): t["coeff"] for t in json.loads(out)["result"]["terms"]}
    assert terms == {(1, 0, -1): 8, (1, 1, -2): 3, (2, 0, -2): 2, (2, 1, -3): 1}
    code, _, _ = run(capsys, "convolve", "--n", "2", "--p", "2", "--lambda", "1,0,-1", "--mu", "1,1,-2")
    assert code == EXIT_USAGE


def test_spherical_csv_to_file(capsys, tmp_path):
    out_path = tmp_path / "sph.csv"
    code, out, _ = run(capsys, "spherical", "--p", "2", "--theta", "0.5", "--labels", "0,0;1,-1",
                       "--format", "csv", "--out", str(out_path))
    assert code == EXIT_OK and out == ""
    lines = out_path.read_text().splitlines()
    assert lines[0].startswith("# version=") and '"output": "csv"' in lines[0]
    assert lines[1] == "t0,re,im"
    assert lines[3].startswith("1 -1,-0.5")


def test_spherical_json(capsys):
    code, out, _ = run(capsys, "spherical", "--p", "3", "--theta", "0.5", "--labels", "1,-1")
    assert code == EXIT_OK
    assert json.loads(out)["result"]["values"][0]["re"] == pytest.approx(-1 / 3)


def test_plancherel(capsys):
    code, out, _ = run(capsys, "plancherel", "--n", "2", "--p", "2", "--lambda", "1,-1", "--resolution", "512")
    assert code == EXIT_OK
    res = json.loads(out)["result"]
    assert res["re"] == pytest.approx(6) and res["exact"] == 6
    code, out, _ = run(capsys, "plancherel", "--n", "2", "--p", "2", "--resolution", "16", "--format", "csv")
    assert code == EXIT_OK and out.splitlines()[1] == "theta1,density"
    code, _, _ = run(capsys, "plancherel", "--n", "2", "--p", "2", "--resolution", "16")
    assert code == EXIT_USAGE


def test_amplifier_build_and_verify(capsys, tmp_path):
    kernel = tmp_path / "k.json"
    code, _, _ = run(capsys, "amplifier", "build", "--n", "2", "--p", "2", "--N", "40", "--theta", "0.01",
                     "--out", str(kernel))
    assert code == EXIT_OK
    built = json.loads(kernel.read_text())["result"]
    assert built["params"]["q1"] == 4 and built["params"]["L"] == 3
    code, out, _ = run(capsys, "amplifier", "verify", "--kernel", str(kernel), "--grid", "1024")
    assert code == EXIT_OK
    report = json.loads(out)["result"]
    assert all(report["pass"].values()) and report["support_r"] == 0.6


def test_amplifier_verify_failure_exits_3(capsys, tmp_path):
    kernel = tmp_path / "k.json"
    run(capsys, "amplifier", "build", "--n", "2", "--p", "2", "--N", "40", "--theta", "0.01", "--out", str(kernel))
    doc = json.loads(kernel.read_text())
    doc["result"]["params"]["epsilon"] = 0.01
    kernel.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "amplifier", "verify", "--kernel", str(kernel), "--grid", "256")
    assert code == EXIT_CHECK
    assert json.loads(out)["result"]["pass"]["eigenvalue"] is False


def test_amplifier_errors(capsys, tmp_path):
    code, _, err = run(capsys, "amplifier", "build", "--n", "2", "--p", "2", "--N", "20", "--theta", "0.1",
                       "--L", "8")
    assert code == EXIT_COMPUTE and "no admissible q1" in err
    code, _, _ = run(capsys, "amplifier", "build", "--n", "3", "--p", "2", "--N", "20", "--theta", "0.1")
    assert code == EXIT_USAGE
    missing = tmp_path / "missing.json"
    code, _, _ = run(capsys, "amplifier", "verify", "--kernel", str(missing))
    assert code == EXIT_USAGE


def test_kronecker(capsys):
    code, out, _ = run(capsys, "kronecker", "approx", "--alpha", "1.4142135623730951,1.7320508075688772",
                       "--eps", "0.1", "--N", "200")
    assert code == EXIT_OK and json.loads(out)["result"]["q"] == 41
    code, out, _ = run(capsys, "kronecker", "defect", "--alpha", "0.5", "--N", "10", "--K", "3")
    assert code == EXIT_OK and json.loads(out)["result"]["defect"] == 1.0
    code, _, _ = run(capsys, "kronecker", "approx", "--alpha", "0.3", "--eps", "0.9", "--N", "10")
    assert code == EXIT_USAGE
    code, _, err = run(capsys, "kronecker", "approx", "--alpha", "0.5", "--eps", "0.01", "--N", "1")
    assert code in (EXIT_OK, EXIT_COMPUTE)


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"resolution": 256}))
    code, out, _ = run(capsys, "plancherel", "--n", "2", "--p", "3", "--lambda", "0,0", "--config", str(cfg))
    assert code == EXIT_OK and json.loads(out)["config"]["resolution"] == 256
    cfg.write_text(json.dumps({"bogus": 1}))
    code, _, _ = run(capsys, "plancherel", "--n", "2", "--p", "3", "--lambda", "0,0", "--config", str(cfg))
    assert code == EXIT_USAGE


def test_selftest(capsys):
    code, out, err = run(capsys, "selftest", "--n", "2", "--p", "2")
    assert code == EXIT_OK
    summary = json.loads(out)["result"]
    assert summary["passed"] == summary["total"] == 10
    assert err.count("[PASS]") == 10
    code, _, _ = run(capsys, "selftest", "--n", "3", "--p", "2")
    assert code == EXIT_USAGE


def test_module_entry_point(isolated_cache):
    proc = subprocess.run([sys.executable, "-m", "spherical_hecke", "satake", "--p", "2", "--lambda", "1,-1"],
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0
    assert len(json.loads(proc.stdout)["result"]["terms"]) == 3
    proc = subprocess.run([sys.executable, "-m", "spherical_hecke", "nope"], capture_output=True, text=True,
                          timeout=120)
    assert proc.returncode == 2
