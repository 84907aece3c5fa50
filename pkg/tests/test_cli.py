import hashlib
import json
import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest

from pfds import cli, datasets
from pfds.trajectory import AuditReport, Violation


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def simplex3_csv(tmp_path):
    f = tmp_path / "s3.csv"
    datasets.write_matrix(f, datasets.simplex(3).dissim)
    return f


@pytest.fixture
def simplex4_run(tmp_path, capsys):
    f = tmp_path / "s4.jsonl"
    code, _, _ = run(capsys, "trajectory", "--builtin", "simplex:4", "--out", str(f))
    assert code == 0
    return f


def test_trajectory_first_line(capsys, tmp_path):
    code, out, _ = run(capsys, "trajectory", "--builtin", "simplex:10",
                       "--lambdas", "lin:0:1:101", "--normalize", "--out", str(tmp_path / "r.jsonl"))
    assert code == 0
    assert out.splitlines()[0] == "itel    1 lambda   0.000000 stress 0.000000 penalty 0.400000"


def test_trajectory_geo(capsys, tmp_path):
    code, out, _ = run(capsys, "trajectory", "--builtin", "simplex:4", "--lambdas", "geo:0.001:2:13",
                       "--cut", "1e-30", "--itmax", "20")
    lams = [line.split()[3] for line in out.splitlines()]
    assert lams[:4] == ["0.000000", "0.001000", "0.002000", "0.004000"]
    assert lams[-1] == "4.096000" and len(lams) == 14


def test_trajectory_deterministic(capsys, tmp_path):
    paths = [tmp_path / "a.jsonl", tmp_path / "b.jsonl"]
    for f in paths:
        run(capsys, "trajectory", "--builtin", "parties", "--lambdas", "lin:0:1:11", "--out", str(f))
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_strict_audits(capsys, monkeypatch):
    monkeypatch.setattr(cli, "audit_monotonicity",
                        lambda rec: AuditReport((Violation(0, "stress", 1e-3),), 1, 1e-9))
    args = ["trajectory", "--builtin", "simplex:4", "--lambdas", "lin:0:0.2:3"]
    code, _, err = run(capsys, *args)
    assert code == 0 and "stress relation violated" in err
    code, _, _ = run(capsys, *args, "--strict-audits")
    assert code == 4


def test_raw_vs_normalized(capsys):
    _, norm, _ = run(capsys, "solve", "--builtin", "simplex:4")
    _, raw, _ = run(capsys, "solve", "--builtin", "simplex:4", "--raw")
    assert norm.split()[-1] == "0.250000" and raw.split()[-1] == "0.750000"


def test_solve_json(capsys, tmp_path):
    f = tmp_path / "s.json"
    code, out, _ = run(capsys, "solve", "--builtin", "parties", "--lambda", "0.5", "--out", str(f))
    data = json.loads(f.read_text())
    assert code == 0 and data["lambda"] == 0.5 and len(data["x"]) == 9 and len(data["x"][0]) == 2


def test_oracle(capsys, simplex3_csv):
    code, out, _ = run(capsys, "oracle", "--data", str(simplex3_csv), "--count-local-minima")
    assert code == 0
    assert out.splitlines()[0] == "best stress 0.166667"
    assert "local minima 3 up to reflection, 6 counting reflections" in out


def test_oracle_too_large(capsys):
    code, _, err = run(capsys, "oracle", "--builtin", "simplex:11")
    assert code == 2 and "instance too large" in err


def test_diagnose(capsys, simplex4_run):
    code, out, _ = run(capsys, "diagnose", "--run", str(simplex4_run))
    assert code == 0
    assert "gower rank 3" in out and "pass" in out and "lambda plus 0.350000" in out


def test_align(capsys, simplex4_run, tmp_path):
    f = tmp_path / "al.json"
    code, _, _ = run(capsys, "align", "--run", str(simplex4_run), "--out", str(f))
    data = json.loads(f.read_text())
    assert code == 0 and len(data["configs"]) == len(data["lambdas"])


def test_plot_is_pure_reader(capsys, simplex4_run, tmp_path):
    before = hashlib.sha256(simplex4_run.read_bytes()).hexdigest()
    svg = tmp_path / "p.svg"
    code, _, _ = run(capsys, "plot", "--run", str(simplex4_run), "--svg", str(svg))
    assert code == 0
    ET.fromstring(svg.read_text())
    code, _, _ = run(capsys, "plot", "--run", str(simplex4_run), "--svg", str(svg), "--index")
    assert code == 0 and 'class="hline"' in svg.read_text()
    assert hashlib.sha256(simplex4_run.read_bytes()).hexdigest() == before


def test_dataset(capsys, tmp_path):
    code, out, _ = run(capsys, "dataset", "--builtin", "parties", "--transform", "subtract:0.1")
    assert code == 0 and "0.019" in out
    f = tmp_path / "p.csv"
    run(capsys, "dataset", "--builtin", "parties", "--out", str(f))
    assert datasets.read_matrix(f)[0].tolist() == datasets.parties().dissim.tolist()


@pytest.mark.parametrize("argv, message", [
    (["trajectory", "--data", "/nonexistent.csv"], "No such file"),
    (["trajectory", "--builtin", "cube"], "unknown built-in"),
    (["trajectory", "--builtin", "simplex:x"], "simplex:N"),
    (["trajectory", "--builtin", "simplex:4", "--lambdas", "lin:1:0:3"], "increasing"),
    (["trajectory", "--builtin", "simplex:4", "--p", "4"], "smaller than n"),
    (["solve", "--builtin", "parties", "--transform", "subtract:0.2"], "subtract_constant"),
    (["diagnose", "--run", "/nonexistent.jsonl"], "No such file"),
])
def test_validation_exit_code(capsys, argv, message):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert message in err and len(err.strip().splitlines()) == 1


def test_numerical_exit_code(capsys, monkeypatch):
    from pfds.errors import NumericalError

    def fail(*a, **k):
        raise NumericalError("non-finite configuration at iteration 7")

    monkeypatch.setattr(cli, "solve_penalized", fail)
    code, _, err = run(capsys, "solve", "--builtin", "simplex:4")
    assert code == 3 and "iteration 7" in err


def test_normalize_raw_exclusive(capsys):
    with pytest.raises(SystemExit):
        cli.main(["solve", "--builtin", "simplex:4", "--raw", "--normalize"])


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "pfds", "solve", "--builtin", "simplex:4"],
                          capture_output=True, text=True, check=True)
    assert proc.stdout.startswith("itel    1 lambda   0.000000")
