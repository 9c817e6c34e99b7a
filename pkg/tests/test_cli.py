import json
import math
import subprocess
import sys

import numpy as np
import pytest

from primerace.cli import main
from primerace.density import delta_two_way
from primerace.fields import multiquadratic
from primerace.race import RaceSpec

MQ = '{"type":"multiquadratic","primes":[5,13]}'


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_table(text):
    rows = {}
    for line in text.splitlines():
        key, _, value = line.partition("  ")
        rows[key.strip()] = value.strip()
    return rows


def test_orthant_exchangeable_closed_value(capsys):
    code, out, _ = run(capsys, "--format", "json-text", "orthant", "--sigma", "gamma:3", "--x", "0,0,0")
    assert code == 0
    payload = json.loads(out)
    assert abs(payload["value"] - 1.0 / 24.0) < 5e-4
    assert payload["seed"] == 0
    assert payload["stderr"] >= 0.0


def test_orthant_matrix_file(tmp_path, capsys):
    path = tmp_path / "sigma.txt"
    path.write_text("1.0,0.5\n0.5,1.0\n")
    code, out, _ = run(capsys, "--format", "json-text", "orthant", "--sigma", str(path), "--x", "0,0")
    assert code == 0
    payload = json.loads(out)
    assert abs(payload["value"] - 1.0 / 3.0) < 1e-9
    assert payload["stderr"] == 0.0


def test_race_stats_table(capsys):
    code, out, _ = run(capsys, "race", "stats", "--field", MQ, "--classes", "e:(1,0),e:(0,1)")
    assert code == 0
    rows = parse_table(out)
    assert rows["mode"] == "asymptotic"
    assert float(rows["lambda_min"]) == 1.0
    assert float(rows["delta_0_0"]) == 1.0


def test_race_density_two_way_matches_library(capsys):
    code, out, _ = run(capsys, "--format", "json-text", "race", "density",
                       "--field", MQ, "--classes", "e:(1,0),e:(0,0)")
    assert code == 0
    payload = json.loads(out)
    spec = RaceSpec(field=multiquadratic([5, 13]),
                    classes=(((1, 0)), ((0, 0))))
    expected = delta_two_way(spec)
    assert abs(payload["value"] - expected.value) < 1e-12
    assert payload["stderr"] == 0.0
    assert payload["formula"] == "two-way"


def test_race_density_three_way_reports_linearized(capsys):
    code, out, _ = run(capsys, "--format", "json-text", "race", "density",
                       "--field", MQ, "--classes", "e:(1,0),e:(0,1),e:(1,1)")
    assert code == 0
    payload = json.loads(out)
    # all three classes are nonsquares, so B = 0 and the linearized formula
    # agrees with the exact bivariate orthant
    assert abs(payload["value"] - payload["linearized_value"]) < 1e-6
    assert 0.0 < payload["value"] < 1.0
    assert all(abs(payload[f"b_{i}"]) < 1e-12 for i in range(2))


def test_race_density_seed_echo_and_qmc_stderr(capsys):
    code, out, _ = run(capsys, "--format", "json-text", "race", "density",
                       "--field", MQ,
                       "--classes", "e:(0,0),e:(1,0),e:(0,1),e:(1,1)",
                       "--samples", "16384", "--seed", "11")
    assert code == 0
    payload = json.loads(out)
    assert payload["seed"] == 11
    assert payload["samples"] == 16384
    assert payload["stderr"] > 0.0


def test_json_values_reprint_identically(capsys):
    code, out, _ = run(capsys, "--format", "json-text", "race", "stats",
                       "--field", MQ, "--classes", "e:(1,0),e:(0,1),e:(1,1)")
    assert code == 0
    payload = json.loads(out)
    for value in payload.values():
        if isinstance(value, float):
            assert float(f"{value:.12g}") == value


def test_zeros_find_writes_ingestible_archive(tmp_path, capsys):
    path = tmp_path / "mq.csv"
    code, out, _ = run(capsys, "--format", "json-text", "zeros", "find",
                       "--field", MQ, "--height", "30", "--out", str(path))
    assert code == 0
    counts = json.loads(out)
    code, out, _ = run(capsys, "--format", "json-text", "zeros", "ingest",
                       "--field", MQ, "--file", str(path))
    assert code == 0
    payload = json.loads(out)
    assert payload["provenance"] == "ingested"
    assert payload["height"] == 30.0
    for label in ("10", "01", "11"):
        assert payload[f"count_{label}"] == counts[f"count_{label}"] > 0


def test_zeros_find_requires_exactly_one_source(capsys):
    code, _, err = run(capsys, "zeros", "find", "--height", "10")
    assert code == 2
    assert "exactly one" in err


def test_ingest_rejects_malformed_line(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text("height=20\nbogus,1.5\n")
    code, _, err = run(capsys, "zeros", "ingest", "--field", MQ, "--file", str(path))
    assert code == 2
    assert "error[zeros]" in err
    assert "line 2" in err


def test_ingest_rejects_unsorted_ordinates(tmp_path, capsys):
    path = tmp_path / "unsorted.csv"
    path.write_text("height=20\n10,6.0\n10,4.0\n01,3.0\n11,2.0\n")
    code, _, err = run(capsys, "zeros", "ingest", "--field", MQ, "--file", str(path))
    assert code == 2
    assert "line 3" in err
    assert "out of order" in err


def test_validation_errors_exit_two(capsys):
    code, _, err = run(capsys, "race", "stats", "--field", MQ, "--classes", "e:(1,0)")
    assert code == 2
    assert "error[race_core]" in err
    code, _, err = run(capsys, "race", "density", "--field", MQ,
                       "--classes", "e:(1,0),e:(0,1)", "--mode", "zeros")
    assert code == 2
    assert "--archive" in err


def test_unknown_flag_exits_two(capsys):
    with pytest.raises(SystemExit) as info:
        main(["race", "stats", "--no-such-flag"])
    assert info.value.code == 2


def test_simulate_matches_formula(tmp_path, capsys):
    path = tmp_path / "mq.csv"
    run(capsys, "zeros", "find", "--field", MQ, "--height", "60", "--out", str(path))
    code, out, _ = run(capsys, "--format", "json-text", "simulate",
                       "--field", MQ, "--classes", "e:(1,0),e:(0,1),e:(1,1)",
                       "--archive", str(path), "--height", "60",
                       "--samples", "200000", "--seed", "5")
    assert code == 0
    payload = json.loads(out)
    assert payload["seed"] == 5
    direct = abs(payload["empirical"] - payload["formula_value"])
    assert payload["discrepancy"] == pytest.approx(direct, rel=1e-10)
    assert payload["discrepancy"] < 0.03
    assert payload["stderr"] > 0.0


def test_construct_prime_step(capsys):
    code, out, _ = run(capsys, "--format", "json-text", "construct", "prime-step",
                       "--ell", "5", "--alpha", "0.5")
    assert code == 0
    payload = json.loads(out)
    assert payload["primes"] == "13 73"
    assert payload["holds"] is True
    assert abs(payload["ratio"] - 0.5) <= payload["bound"]


def test_construct_block_cap_exit_one(capsys):
    code, _, err = run(capsys, "construct", "prime-step", "--ell", "5",
                       "--alpha", "0.05", "--max-block", "4")
    assert code == 1
    assert "error[constructions]" in err


def test_construct_u_dense_and_theorem_c(capsys):
    code, out, _ = run(capsys, "--format", "json-text", "construct", "u-dense",
                       "--targets", "0.5")
    assert code == 0
    payload = json.loads(out)
    assert payload["primes"].startswith("5 ")
    assert payload["block0_holds"] is True

    code, out, _ = run(capsys, "--format", "json-text", "construct", "theorem-c",
                       "--depth", "2")
    assert code == 0
    payload = json.loads(out)
    assert payload["holds"] is True
    assert payload["depth2_lhs"] > payload["depth2_rhs"]


def test_construct_b_dense(capsys):
    code, out, _ = run(capsys, "--format", "json-text", "construct", "b-dense",
                       "--targets", "2.0", "--epsilons", "0.2")
    assert code == 0
    payload = json.loads(out)
    assert payload["block0_holds"] is True
    assert abs(payload["block0_value"] - 2.0) < 0.2


def test_family_report_emits_csv_and_figures(tmp_path, capsys):
    specs = tmp_path / "specs"
    specs.mkdir()
    (specs / "a.json").write_text('{"type":"multiquadratic","primes":[5]}')
    (specs / "b.json").write_text('{"type":"multiquadratic","primes":[5,13]}')
    out_dir = tmp_path / "out"
    code, out, err = run(capsys, "--format", "csv", "family", "report",
                         "--specs", str(specs), "--out-dir", str(out_dir))
    assert code == 0
    assert (out_dir / "family_report.csv").exists()
    assert (out_dir / "family_indices.png").exists()
    assert (out_dir / "family_u_values.png").exists()
    lines = out.strip().splitlines()
    assert lines[0].startswith("depth,")
    assert len(lines) == 3
    disk = (out_dir / "family_report.csv").read_text().strip().splitlines()
    assert [l.rstrip("\r") for l in disk] == lines
    first = lines[1].split(",")
    assert first[0] == "1"
    assert abs(float(first[1]) - math.log(5)) < 1e-9


def test_family_report_requires_directory(tmp_path, capsys):
    code, _, err = run(capsys, "family", "report", "--specs", str(tmp_path / "nope"))
    assert code == 2
    assert "directory" in err


def test_cache_cold_and_warm_outputs_match(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("PRIMERACE_CACHE_DIR", str(tmp_path / "cache"))
    args = ("--format", "json-text", "zeros", "find", "--q", "5", "--height", "20")
    code, cold, _ = run(capsys, *args)
    assert code == 0
    assert any((tmp_path / "cache").iterdir())
    code, warm, _ = run(capsys, *args)
    assert code == 0
    assert warm == cold


def test_cache_dir_flag(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("PRIMERACE_CACHE_DIR", str(tmp_path / "unused"))
    target = tmp_path / "flagged"
    code, _, _ = run(capsys, "--cache-dir", str(target),
                     "zeros", "find", "--q", "5", "--height", "20")
    assert code == 0
    assert any(target.iterdir())


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "primerace.cli", "orthant",
         "--sigma", "sigma:2:0.0", "--x", "0,0"],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert "0.25" in proc.stdout
