import csv
import json
import subprocess
import sys
from importlib import resources

import pytest

from qpes.cli import main

DATA = str(resources.files("qpes") / "data" / "n16_k2.json")
WALK = str(resources.files("qpes") / "data" / "n16_k2_walk.json")
PES = ["pes", "--matrix", DATA, "--alpha", "1", "--m", "6", "--lambda-l", "-0.21875", "--lambda-r", "-0.03125"]


def read_rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def test_pes_outputs(tmp_path, capsys):
    assert main(PES + ["--out", str(tmp_path), "--seed", "7"]) == 0
    out = capsys.readouterr().out
    assert "qubits=12" in out and "classical_words=529" in out
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert man["resolved"]["shots"] == 877 and man["resolved"]["k"] == 2
    assert man["memory"]["qubits"] == 4 + 6 + 2
    assert len(man["inputs"]["matrix"]["sha256"]) == 64
    rows = read_rows(tmp_path / "estimates.csv")
    inside = [r for r in rows if r["in_window"] == "true"]
    assert sorted(int(r["phi"]) for r in inside) == [13, 15]
    assert all(abs(float(r["amp_sq_hat"]) - 0.09) < 0.009 for r in inside)
    dist = read_rows(tmp_path / "distribution.csv")
    assert abs(sum(float(r["probability"]) for r in dist) - 1) < 1e-9


def test_pes_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(PES + ["--out", str(d), "--seed", "7"]) == 0
    for name in ("estimates.csv", "distribution.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    ma = json.loads((a / "manifest.json").read_text())
    mb = json.loads((b / "manifest.json").read_text())
    ma["config"].pop("out"), mb["config"].pop("out")
    assert ma == mb


def test_walk_model(tmp_path):
    args = ["pes", "--matrix", WALK, "--alpha", "1", "--m", "6", "--model", "walk",
            "--lambda-l", "-0.04906767432741801", "--lambda-r", "0.14673047445536175", "--out", str(tmp_path)]
    assert main(args) == 0
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert man["memory"]["qubits"] == 4 + 6 + 2 + 1
    assert man["resolved"]["windows"] == [[15, 17], [48, 50]]


def test_config_precedence(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"shots": 100, "seed": 3, "gamma": 0.5}))
    assert main(PES + ["--config", str(cfg), "--seed", "4", "--out", str(tmp_path / "o")]) == 0
    man = json.loads((tmp_path / "o" / "manifest.json").read_text())
    assert man["resolved"]["shots"] == 100
    assert man["config"]["seed"] == 4 and man["config"]["gamma"] == 0.5 and man["config"]["m"] == 6


def test_ces(tmp_path):
    args = ["ces", "--matrix", DATA, "--alpha", "1", "--gamma", "1", "--out", str(tmp_path)]
    assert main(args) == 0
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert man["resolved"]["shots"] == 828
    rows = read_rows(tmp_path / "estimates.csv")
    assert all(r["in_window"] == "true" for r in rows)


@pytest.mark.parametrize("method", ["lanczos", "qr"])
def test_classical(tmp_path, method):
    assert main(["classical", "--matrix", DATA, "--method", method, "--k", "3", "--out", str(tmp_path)]) == 0
    rows = read_rows(tmp_path / "estimates.csv")
    assert len(rows) == 3
    assert float(rows[0]["lambda_hat"]) == pytest.approx(1.0, abs=1e-9)
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert man["memory"]["classical_words"] == 529


def test_classical_power_tie_is_numerical_failure(tmp_path, capsys):
    # the shipped matrix has eigenvalues +1 and -1, so the top magnitude is tied
    code = main(["classical", "--matrix", DATA, "--method", "power", "--k", "1", "--max-iter", "200",
                 "--out", str(tmp_path)])
    assert code == 3
    assert json.loads(capsys.readouterr().err)["exit_code"] == 3


def test_scaling(tmp_path):
    assert main(["scaling", "--n-min", "1024", "--n-max", "1048576", "--out", str(tmp_path)]) == 0
    for name in ("curves.csv", "crossovers.csv", "metadata.json", "plot.svg", "manifest.json"):
        assert (tmp_path / name).exists()
    svg = (tmp_path / "plot.svg").read_text()
    for method in ("PES", "CES", "Power", "Lanczos", "QR"):
        assert method in svg


def test_verify_comparator(capsys):
    assert main(["verify", "--suite", "comparator", "--m", "3"]) == 0
    assert capsys.readouterr().out.count("PASS") == 3


@pytest.mark.parametrize("argv, code", [
    (["pes", "--bogus"], 1),
    (["nothing"], 1),
    (["pes", "--lambda-l", "0", "--lambda-r", "1"], 1),
    (["pes", "--matrix", "/nonexistent.json", "--lambda-l", "0", "--lambda-r", "1"], 2),
    (PES[:-4] + ["--lambda-l", "0.9", "--lambda-r", "0.95"], 2),
    (PES + ["--gamma", "2"], 2),
    (PES + ["--shots", "0"], 2),
])
def test_exit_codes(argv, code, capsys, tmp_path):
    assert main(argv + ["--out", str(tmp_path)] if argv[0] == "pes" and "--bogus" not in argv else argv) == code
    err = json.loads(capsys.readouterr().err)
    assert err["exit_code"] == code and err["message"]


def test_console_script_entry(tmp_path):
    r = subprocess.run([sys.executable, "-m", "qpes.cli", "verify", "--suite", "aa"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "FAIL" not in r.stdout
