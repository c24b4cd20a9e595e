import json
import subprocess
import sys

import pytest

from qflag import classifier
from qflag.cli import main
from qflag.qscalar import q_binomial, q_power, serialize_scalar
from qflag.rootdata import RootSystem, ToricPoint


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    report = json.loads(out) if out.strip() else None
    return code, report, err


@pytest.fixture
def chi_file(tmp_path):
    chi = ToricPoint.from_character(RootSystem("A", 2), [q_power(3) + 2, q_power(-1) * 5])
    path = tmp_path / "chi.json"
    path.write_text(json.dumps(chi.to_json()))
    return path


def test_report_shape(capsys, chi_file):
    code, report, _ = run(capsys, "toric", "validate", "--regular", "--chi", str(chi_file))
    assert code == 0
    assert set(report) == {"command", "ok", "details", "elapsedMillis"}
    assert report["command"] == "toric validate" and report["ok"]
    assert isinstance(report["elapsedMillis"], int)


def test_webs_bubble(capsys):
    code, report, _ = run(capsys, "webs", "verify", "--n", "2", "--relation", "bubble")
    assert code == 0 and report["ok"]
    for r in report["details"]["results"]:
        k, l = r["params"]
        assert r["scalar"] == serialize_scalar(q_binomial(k + l, k))


def test_webs_sampling_is_seeded(capsys):
    _, a, _ = run(capsys, "--seed", "7", "webs", "verify", "--n", "3", "--sample", "5")
    _, b, _ = run(capsys, "--seed", "7", "webs", "verify", "--n", "3", "--sample", "5")
    key = lambda rep: [(r["relation"], r["params"]) for r in rep["details"]["results"]]
    assert key(a) == key(b) and len(key(a)) == 5


def test_gamma_classify_round_trip(capsys, tmp_path, chi_file):
    gamma_path = tmp_path / "g.json"
    out_path = tmp_path / "back.json"
    code, _, _ = run(capsys, "gamma", "from-chi", "--chi", str(chi_file), "--window", "1", "--out", str(gamma_path))
    assert code == 0
    code, report, _ = run(capsys, "classify", "--gamma", str(gamma_path), "--out", str(out_path))
    assert code == 0
    assert json.loads(out_path.read_text()) == json.loads(chi_file.read_text())
    assert report["details"]["chi"] == json.loads(chi_file.read_text())


def test_gamma_json_round_trips_bit_exactly(capsys, tmp_path, chi_file):
    gamma_path = tmp_path / "g.json"
    run(capsys, "gamma", "from-chi", "--chi", str(chi_file), "--window", "1", "--out", str(gamma_path))
    data = json.loads(gamma_path.read_text())
    assert classifier.ScalarSystem.from_json(data).to_json() == data


def test_classify_inconsistent_table_exits_one(capsys, tmp_path, chi_file):
    gamma_path = tmp_path / "g.json"
    run(capsys, "gamma", "from-chi", "--chi", str(chi_file), "--window", "1", "--out", str(gamma_path))
    data = json.loads(gamma_path.read_text())
    data["entries"][0]["value"] = "7"
    gamma_path.write_text(json.dumps(data))
    code, report, _ = run(capsys, "classify", "--gamma", str(gamma_path))
    assert code == 1 and not report["ok"]


def test_poisson_quot_violation(capsys, tmp_path):
    path = tmp_path / "phi.json"
    path.write_text(json.dumps({"type": "A", "rank": 2, "entries": [
        {"root": [1, 0], "value": "3"}, {"root": [0, 1], "value": "1"}, {"root": [1, 1], "value": "1"}]}))
    code, report, _ = run(capsys, "poisson", "check", "--type", "A", "--rank", "2", "--space", "quot", "--phi", str(path))
    assert code == 1
    assert report["details"]["violations"][0]["roots"] == [[1, 0]]
    code, report, _ = run(capsys, "poisson", "check", "--rank", "2", "--space", "fssorb", "--phi", str(path))
    assert code == 0


def test_poisson_normalize(capsys, tmp_path):
    path = tmp_path / "phi.json"
    path.write_text(json.dumps({"entries": [{"root": [1, 0], "value": "-1"}, {"root": [0, 1], "value": "1/2"}, {"root": [1, 1], "value": "-1"}]}))
    code, report, _ = run(capsys, "poisson", "normalize", "--phi", str(path))
    assert code == 0 and report["details"]["audit"]["nonnegative"]


def test_cato_commands(capsys, chi_file):
    code, report, _ = run(capsys, "cato", "dominance", "--chi", str(chi_file), "--lambda", "0,0", "--mode", "simple")
    assert code == 0 and report["ok"]
    code, report, _ = run(capsys, "cato", "shapovalov", "--nu", "1,1", "--chi", str(chi_file))
    assert code == 0 and report["details"]["factors"]
    code, report, _ = run(capsys, "cato", "invariant-coeff", "--chi", str(chi_file), "--mu", "1,0", "--nu", "1,0", "--eps", "0", "--lambda", "0,0")
    assert code == 0 and report["details"]["value"]


def test_identity_fraction(capsys):
    code, report, _ = run(capsys, "identity", "fraction", "--kmax", "3", "--mrange", "3")
    assert code == 0 and report["details"]["failures"] == []


def test_input_errors_exit_two(capsys, tmp_path):
    code, report, err = run(capsys, "classify", "--gamma", str(tmp_path / "missing.json"))
    assert code == 2 and report is None and "cannot read" in err
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run(capsys, "toric", "validate", "--chi", str(bad))
    assert code == 2 and "not valid JSON" in err
    code, _, err = run(capsys, "webs", "verify", "--n", "2", "--relation", "nope")
    assert code == 2


def test_unknown_flag_exits_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["webs", "verify", "--bogus"])
    assert exc.value.code == 2


def test_module_entry_point(chi_file):
    proc = subprocess.run([sys.executable, "-m", "qflag", "toric", "validate", "--chi", str(chi_file)], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["ok"]


def test_thread_variable_validation(capsys, monkeypatch):
    monkeypatch.setenv("QFLAG_THREADS", "many")
    code, _, err = run(capsys, "webs", "verify", "--n", "2", "--relation", "bubble")
    assert code == 2 and "QFLAG_THREADS" in err
    monkeypatch.setenv("QFLAG_THREADS", "2")
    code, report, _ = run(capsys, "webs", "verify", "--n", "3")
    assert code == 0 and report["ok"]
