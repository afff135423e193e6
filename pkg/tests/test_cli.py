import csv
import io
import json
import subprocess
import sys

import pytest

from bellrepeat.cli import EXIT_CONFIG, EXIT_OK, main
from bellrepeat.symplectic_codes import SelfDualCode, sample_uniform


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def parse_csv(text):
    header = [l for l in text.splitlines() if l.startswith("# ")]
    body = "\n".join(l for l in text.splitlines() if not l.startswith("# "))
    return header, list(csv.DictReader(io.StringIO(body)))


def without_timings(text):
    d = json.loads(text)
    d.pop("timings")
    return json.dumps(d, sort_keys=True)


def test_bound_csv(capsys):
    code, out, _ = run_cli(capsys, "bound", "--p", "0.4,0.3,0.2,0.1", "--n-range", "1:6", "--seed", "1")
    assert code == EXIT_OK
    header, rows = parse_csv(out)
    assert {h.split(":")[0] for h in header} == {"# version", "# seed", "# config", "# timings"}
    vals = [float(r["gamma_upper_bound"]) for r in rows]
    assert len(rows) == 6 and all(a > b for a, b in zip(vals, vals[1:]))
    assert all(float(r["gamma_upper_bound"]) <= float(r["theorem1_bound"]) + 1e-12 for r in rows)


def test_converge_flags_counterexample(capsys):
    code, out, _ = run_cli(capsys, "converge", "--p", "0.9,0.05,0.05,0", "--n-range", "8:9",
                           "--trials", "20", "--seed", "3", "--format", "json")
    assert code == EXIT_OK
    rows = json.loads(out)["result"]
    assert [r["N"] for r in rows] == [8, 9]
    assert all(r["counterexample_flag"] and r["eta_best"] > 0.95 for r in rows)


def test_phase_grid(capsys, tmp_path):
    dest = tmp_path / "phase.csv"
    code, out, _ = run_cli(capsys, "phase", "--grid-res", "0.01", "--out", str(dest))
    assert code == EXIT_OK and out == ""
    _, rows = parse_csv(dest.read_text())
    assert len(rows) == 5151
    labels = {r["label"] for r in rows}
    assert {"CONVERGES_TO_ZERO", "CONVERGES_TO_ONE", "BOUNDARY_PERFECT"} <= labels


def test_codes_count_and_enumerate(capsys):
    code, out, _ = run_cli(capsys, "codes", "count", "--n-range", "1:3")
    rows = json.loads(out)["result"]
    assert [r["count"] for r in rows] == ["3", "15", "135"]
    assert [r["ratio"] for r in rows] == ["1/3", "1/5", "1/9"]
    code, out, _ = run_cli(capsys, "codes", "enumerate", "--n", "2")
    assert json.loads(out)["result"]["enumerated"]["2"]["count"] == 15


def test_codes_sample_round_trips(capsys):
    code, out, _ = run_cli(capsys, "codes", "sample", "--n-range", "4:5", "--seed", "9")
    codes = [SelfDualCode.from_dict(d) for d in json.loads(out)["result"]["codes"]]
    assert [c.n_qubits for c in codes] == [4, 5]


def test_game_is_byte_identical_apart_from_timings(capsys):
    argv = ["game", "--p", "0.9,0.05,0.05,0", "--n", "6", "--trials", "10", "--samples", "2000", "--seed", "5"]
    _, first, _ = run_cli(capsys, *argv)
    _, second, _ = run_cli(capsys, *argv)
    assert without_timings(first) == without_timings(second)
    rep = json.loads(first)["result"]["report"]
    assert rep["seed"] == 5 and rep["counterexample_flag"] == (rep["eta_best"] > rep["gamma1"])


def test_game_with_code_file(capsys, tmp_path):
    f = tmp_path / "code.json"
    f.write_text(sample_uniform(5, 2).to_json())
    code, out, _ = run_cli(capsys, "game", "--p", "0.7,0.1,0.1,0.1", "--n", "5", "--code", str(f),
                           "--samples", "1000", "--seed", "1")
    assert code == EXIT_OK
    assert json.loads(out)["result"]["game"]["trials"] == 1000


def test_verify_passes(capsys):
    code, out, _ = run_cli(capsys, "verify", "--n-range", "1:3", "--seed", "2")
    assert code == EXIT_OK and json.loads(out)["result"]["all_pass"]


@pytest.mark.parametrize("argv", [
    ["bound", "--p", "0.5,0.5,0.5,0"],
    ["bound", "--p", "0.5,0.5"],
    ["bound"],
    ["bound", "--p", "1,0,0,0", "--n", "0"],
    ["bound", "--p", "1,0,0,0", "--n-range", "5:2"],
    ["phase", "--grid-res", "0.3"],
    ["verify", "--n", "5"],
    ["codes", "enumerate", "--n", "4"],
    ["game", "--p", "1,0,0,0", "--n-range", "1:2"],
    ["codes", "frobnicate"],
    ["codes", "sample", "--format", "csv"],
])
def test_config_errors_exit_2(capsys, argv):
    code, _, err = run_cli(capsys, *argv)
    assert code == EXIT_CONFIG and err


def test_corrupted_code_file(capsys, tmp_path):
    f = tmp_path / "bad.json"
    f.write_text(json.dumps({"n_qubits": 2, "generators": ["1", "2"]}))  # anticommuting
    code, _, err = run_cli(capsys, "game", "--p", "0.7,0.1,0.1,0.1", "--n", "2", "--code", str(f))
    assert code == EXIT_CONFIG and "error" in err
    f.write_text("{not json")
    assert run_cli(capsys, "verify", "--code", str(f))[0] == EXIT_CONFIG


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "bellrepeat.cli", "codes", "count", "--n", "1"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and '"count": "3"' in res.stdout
