import hashlib
import json
import subprocess
import sys

import pytest

from gateuniv import __version__
from gateuniv.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("d, n, expect", [("2", "2", "17"), ("2", "6", "81"), ("3", "2", "82")])
def test_bound(capsys, d, n, expect):
    code, out, _ = run(capsys, "bound", d, n)
    assert code == 0 and out.strip() == expect


def test_bound_ivanyos(capsys):
    code, out, _ = run(capsys, "bound", "3", "2", "--ivanyos")
    assert out.strip() == "6562"


def test_bound_rejects_small(capsys):
    code, _, err = run(capsys, "bound", "1", "2")
    assert code == 1 and "error" in err


def test_analyze_ht(capsys, gateset_dir):
    path = gateset_dir / "ht1.json"
    code, out, err = run(capsys, "analyze", str(path), "--n-max", "2")
    rep = json.loads(out)
    assert code == 0
    assert rep["verdict"]["kind"] == "UniversalAt"
    assert rep["verdict"]["N"] == 1
    assert rep["input"]["sha256"] == hashlib.sha256(path.read_bytes()).hexdigest()
    assert rep["version"] == __version__
    assert rep["bounds"] == {"new": 1, "ivanyos": 1}


def test_analyze_is_reproducible(capsys, gateset_dir):
    path = str(gateset_dir / "pauli1.json")
    reports = []
    for _ in range(2):
        code, out, _ = run(capsys, "analyze", path, "--mc-samples", "500", "--seed", "4")
        rep = json.loads(out)
        rep.pop("timings")
        reports.append(json.dumps(rep, sort_keys=True))
    assert reports[0] == reports[1]


def test_analyze_clifford(capsys, gateset_dir):
    code, out, _ = run(capsys, "analyze", str(gateset_dir / "clifford2.json"))
    assert code == 0
    assert json.loads(out)["verdict"]["kind"] == "CliffordBlocked"


def test_analyze_undecided_exit_code(capsys, tmp_path):
    # T on one half of a 2-qubit register plus CZ: not a design below the register bound
    from gateuniv.gates import CZ, I2, T
    from gateuniv.gateset import make_gateset
    import numpy as np
    p = tmp_path / "t.json"
    p.write_text(make_gateset(2, 2, [CZ, np.kron(T, I2)]).to_json())
    code, out, _ = run(capsys, "analyze", str(p), "--n-max", "2")
    assert code == 2
    assert json.loads(out)["verdict"]["kind"] == "NotDecided"


def test_analyze_bad_file(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"d": 2}')
    code, out, err = run(capsys, "analyze", str(p))
    assert code == 1 and out == "" and "error" in err


def test_moments_exact(capsys, gateset_dir):
    code, out, _ = run(capsys, "moments", str(gateset_dir / "pauli1.json"), "1", "2", "--exact")
    rep = json.loads(out)
    assert code == 0 and rep["exact"] == 4 and rep["haar"] == 2


def test_moments_mc(capsys, gateset_dir):
    code, out, _ = run(capsys, "moments", str(gateset_dir / "ht1.json"), "1", "2", "--mc",
                       "--samples", "2000", "--wordlen", "50", "--seed", "2")
    rep = json.loads(out)
    assert rep["samples"] == 2000 and rep["stderr"] > 0


def test_moments_inconclusive(capsys, tmp_path):
    from gateuniv.gateset import make_gateset
    import numpy as np
    p = tmp_path / "r.json"
    p.write_text(make_gateset(2, 1, [np.diag([1, np.exp(1e-3j)])]).to_json())
    code, out, _ = run(capsys, "moments", str(p), "1", "2")
    assert code == 2 and "inconclusive" in json.loads(out)


def test_jeandel_verify_k2(capsys):
    code, out, err = run(capsys, "jeandel", "verify", "2")
    rep = json.loads(out)
    assert code == 0
    assert all(r["passed"] for r in rep["compile"]["results"])
    assert "skipped" in rep["witness"]


def test_jeandel_verify_k3_reports_counterexample(capsys):
    code, out, err = run(capsys, "jeandel", "verify", "3")
    rep = json.loads(out)
    assert code == 0
    assert rep["parity_counterexamples"][0] == {"q": 1, "binomial": 4, "odd": False}
    assert "binom(4,3) = 4" in err


def test_jeandel_verify_k4(capsys):
    code, out, _ = run(capsys, "jeandel", "verify", "4")
    assert code == 0 and json.loads(out)["witness"]["holds"]


def test_jeandel_build_round_trip(capsys, tmp_path):
    out_file = tmp_path / "b2.json"
    code, _, _ = run(capsys, "jeandel", "build", "2", "--out", str(out_file))
    obj = json.loads(out_file.read_text())
    assert code == 0 and obj["n"] == 4 and len(obj["gates"]) == 5


def test_jeandel_custom_omega(capsys, gateset_dir):
    code, out, _ = run(capsys, "jeandel", "verify", "2", "--omega", str(gateset_dir / "cz.json"))
    assert code == 0
    assert [r["label"] for r in json.loads(out)["compile"]["results"]] == ["CZ"]


def test_dioph_lie_type_lines(capsys):
    code, out, _ = run(capsys, "dioph", "lie-type", "--d-max", "50", "--N-max", "6", "--k-max", "30")
    lines = [json.loads(line) for line in out.splitlines()]
    assert [(x["d"], x["N"], x["k"]) for x in lines] == [(2, 2, 2), (11, 2, 5)]


def test_dioph_cohn(capsys):
    code, out, _ = run(capsys, "dioph", "cohn", "--y-max", "1000", "--z-max", "20", "--k-max", "6")
    assert {"y": 239, "z": 13, "k": 4} in [json.loads(line) for line in out.splitlines()]


def test_module_entry_point(gateset_dir):
    res = subprocess.run([sys.executable, "-m", "gateuniv", "bound", "2", "2"],
                         capture_output=True, text=True, check=True)
    assert res.stdout.strip() == "17"
