import json
import os
import subprocess
import sys

import pytest

from qubithammer.cli import EXIT_INFEASIBLE, EXIT_INVALID, EXIT_OK, EXIT_USAGE, main, read_csv


@pytest.fixture
def s2bai(tmp_path):
    path = tmp_path / "s2bai.json"
    obj = {"label": "S2_BAI", "victim_qubits": [0, 1], "adversary_qubits": list(range(71, 127)),
           "attack": {"method": "repeated", "n_pulses": 5}}
    path.write_text(json.dumps(obj))
    return path


def test_device_validate(capsys):
    assert main(["device", "validate", "eagle127.json"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "127 qubits" in out and "144 edges" in out


def test_device_validate_bad_file(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"name": "x"}')
    assert main(["device", "validate", str(bad)]) == EXIT_INVALID
    assert main(["device", "validate", str(tmp_path / "missing.json")]) == EXIT_INVALID


def test_usage_errors(capsys):
    assert main(["attack", "run", "--bogus"]) == EXIT_USAGE
    assert "usage" in capsys.readouterr().err
    assert main([]) == EXIT_USAGE
    assert main(["attack", "sweep", "--label", "S1_BAI", "--out", "x.csv"]) == EXIT_USAGE


def test_attack_run(tmp_path, s2bai):
    out = tmp_path / "r.json"
    rc = main(["attack", "run", "--device", "eagle127.json", "--scenario", str(s2bai), "--bench", "grover2",
               "--shots", "4096", "--seed", "7", "--out", str(out), "--plot", str(tmp_path / "r.svg")])
    assert rc == EXIT_OK
    r = json.loads(out.read_text())
    assert 0.0 <= r["tv_distance"] <= 1.0
    assert r["baseline"]["shots"] == 4096 and sum(r["attacked"]["counts"].values()) == 4096
    assert r["manifest"]["seed"] == 7 and set(r["manifest"]["config_sha256"]) == {"device", "scenario"}
    assert (tmp_path / "r.svg").read_text().startswith("<?xml")


def _run_in(d, argv):
    cwd = os.getcwd()
    os.chdir(d)
    try:
        return main(argv)
    finally:
        os.chdir(cwd)


def test_identical_reruns_byte_identical(tmp_path, s2bai):
    argv = ["attack", "run", "--scenario", str(s2bai), "--shots", "1024", "--seed", "3", "--out", "r.json",
            "--plot", "r.svg"]
    a, b = tmp_path / "a", tmp_path / "b"
    a.mkdir(), b.mkdir()
    assert _run_in(a, argv) == _run_in(b, argv) == EXIT_OK
    assert (a / "r.json").read_bytes() == (b / "r.json").read_bytes()
    assert (a / "r.svg").read_bytes() == (b / "r.svg").read_bytes()


def test_timing_flag_adds_runtime(tmp_path, s2bai):
    out = tmp_path / "t.json"
    assert main(["attack", "run", "--scenario", str(s2bai), "--shots", "256", "--out", str(out), "--timing"]) == 0
    r = json.loads(out.read_text())
    assert r["runtime_ms"] > 0 and r["manifest"]["timestamp"]


def test_scenario_gen_and_infeasible(tmp_path):
    out = tmp_path / "s.json"
    assert main(["scenario", "gen", "--label", "S2_CAI", "--victims", "0,1", "--size", "16", "--seed", "2",
                 "--out", str(out)]) == EXIT_OK
    s = json.loads(out.read_text())
    assert s["label"] == "S2_CAI" and len(s["adversary_qubits"]) == 16
    assert main(["scenario", "gen", "--label", "S1_CAI", "--size", "120", "--out", str(out)]) == EXIT_INFEASIBLE


def test_scenario_with_defense_infeasible(tmp_path):
    out = tmp_path / "s.json"
    assert main(["scenario", "gen", "--label", "S1_CAI", "--victims", "0", "--size", "4", "--seed", "1",
                 "--out", str(out)]) == EXIT_OK
    rc = main(["attack", "run", "--scenario", str(out), "--defense", "idle-pad", "--defense-args", "distance=60",
               "--bench", "idle", "--out", str(tmp_path / "r.json")])
    assert rc == EXIT_INFEASIBLE


def test_block_custom_pulses(tmp_path, s2bai):
    rc = main(["attack", "run", "--scenario", str(s2bai), "--block-custom-pulses", "--out", str(tmp_path / "r.json")])
    assert rc == EXIT_INVALID


def test_sweep_rows_and_plot(tmp_path):
    out = tmp_path / "sweep.csv"
    rc = main(["attack", "sweep", "--pulses", "1:4", "--bench", "grover2", "--label", "S1_BAI", "--seeds", "2",
               "--shots", "1024", "--out", str(out), "--plot", str(tmp_path / "trend.svg")])
    assert rc == EXIT_OK
    manifest, rows = read_csv(out)
    assert len(rows) == 8 and manifest["seed"] == 0
    assert [int(r["pulses"]) for r in rows] == [1, 1, 2, 2, 3, 3, 4, 4]
    means = [sum(float(r["tv"]) for r in rows if int(r["pulses"]) == n) / 2 for n in range(1, 5)]
    assert all(b >= a for a, b in zip(means, means[1:]))
    assert (tmp_path / "trend.svg").exists()
    assert main(["plot", str(out), "--out", str(tmp_path / "again.svg")]) == EXIT_OK


def test_calibrate_commands(tmp_path):
    sw, fit = tmp_path / "sweep.csv", tmp_path / "sweep.json"
    assert main(["calibrate", "freq-sweep", "--qubit", "3", "--out", str(sw), "--json", str(fit),
                 "--plot", str(tmp_path / "s.svg")]) == EXIT_OK
    assert len(read_csv(sw)[1]) == 201
    rb, cal = tmp_path / "rabi.csv", tmp_path / "cal.json"
    assert main(["calibrate", "rabi", "--qubit", "3", "--sweep-json", str(fit), "--out", str(rb), "--json", str(cal),
                 "--plot", str(tmp_path / "r.svg")]) == EXIT_OK
    c = json.loads(cal.read_text())
    assert c["converged"] and c["qubit"] == 3 and c["t_theta_dt"] > 0


def test_console_script_entrypoint():
    r = subprocess.run([sys.executable, "-m", "qubithammer.cli", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and "qubithammer" in r.stdout
