import json
import math
import subprocess
import sys

import pytest

from sqfree.cli import main
from sqfree.sieve import count_tuples
from sqfree.buchstab import SquareMultipleQuery, count_square_multiples


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_csv(text):
    lines = text.strip().split("\n")
    header = lines[0].split(",")
    return [dict(zip(header, line.split(","))) for line in lines[1:]]


# ------------------------------------------------------------ commands

def test_count_command(capsys):
    code, out, _ = run_cli(capsys, "count", "--x", "0", "--h", "10", "--offsets", "0")
    assert code == 0
    rows = parse_csv(out)
    assert rows[0]["q"] == "7"


def test_count_accepts_underscores(capsys):
    code, out, _ = run_cli(capsys, "count", "--x", "1_000", "--h", "1_00", "--offsets", "0,1")
    assert code == 0
    assert parse_csv(out)[0]["x"] == "1000"


def test_count_z_auto_means_default_level(capsys):
    code, out, _ = run_cli(capsys, "count", "--x", "0", "--h", "10", "--offsets", "0",
                           "--z", "auto")
    assert code == 0
    assert parse_csv(out)[0]["q"] == "7"


def test_density_command(capsys):
    code, out, _ = run_cli(capsys, "density", "--offsets", "0", "--prime-cutoff", "1000000")
    assert code == 0
    row = parse_csv(out)[0]
    assert float(row["lower"]) <= 0.6079271 <= float(row["upper"])
    assert row["inverse_holds"] == "true"


def test_density_degenerate_row(capsys):
    code, out, _ = run_cli(capsys, "density", "--offsets", "0,1,2,3", "--prime-cutoff", "10000")
    assert code == 0
    row = parse_csv(out)[0]
    assert row["degenerate_zero"] == "true"
    assert row["lower"] == "0" and row["upper"] == "0"
    assert row["inverse_upper"] == ""


def test_selberg_command_auto_level(capsys):
    code, out, _ = run_cli(
        capsys, "selberg", "--x", "10000", "--h", "500", "--offsets", "0", "--z", "auto"
    )
    assert code == 0
    row = parse_csv(out)[0]
    assert float(row["form_value"]) >= int(row["exact_count"])
    assert row["certified"] == "true"


def test_selberg_explicit_level(capsys):
    code, out, _ = run_cli(
        capsys, "selberg", "--x", "1000", "--h", "200", "--offsets", "0,1", "--z", "12.5"
    )
    assert code == 0
    row = parse_csv(out)[0]
    assert float(row["z"]) == 12.5
    assert row["certified"] == "true"


def test_buchstab_command(capsys):
    code, out, _ = run_cli(
        capsys, "buchstab", "--x", "10_000", "--h", "1000", "--offsets", "0,2",
        "--lambda0", "5",
    )
    assert code == 0
    row = parse_csv(out)[0]
    assert row["reconciliation"] == "0"
    assert int(row["base_count"]) - int(row["removed_total"]) == int(row["exact_count"])


def test_squaremul_command(capsys):
    code, out, _ = run_cli(
        capsys, "squaremul", "--x", "100", "--h", "20", "--d-lo", "5", "--d-hi", "10"
    )
    assert code == 0
    assert parse_csv(out)[0]["count"] == "1"
    assert parse_csv(out)[0]["count"] == str(
        count_square_multiples(SquareMultipleQuery(100, 20, 5, 10))
    )


def test_sweep_grid_cardinality(capsys):
    code, out, _ = run_cli(
        capsys, "sweep", "--x", "1000,2000,3000", "--h", "50", "--offsets", "0"
    )
    assert code == 0
    assert len(parse_csv(out)) == 3


def test_sweep_degenerate_pattern_has_empty_ratio(capsys):
    code, out, _ = run_cli(
        capsys, "sweep", "--x", "1000", "--h", "50", "--offsets", "0,1,2,3",
        "--prime-cutoff", "10000",
    )
    assert code == 0
    row = parse_csv(out)[0]
    assert row["q"] == "0"
    assert row["density_mid"] == "0"
    assert row["ratio"] == "" and row["excess_stat"] == ""


def test_sweep_multiple_patterns(capsys):
    code, out, _ = run_cli(
        capsys, "sweep", "--x", "1000", "--h", "50,60", "--offsets", "0",
        "--offsets", "0,1",
    )
    assert code == 0
    rows = parse_csv(out)
    assert len(rows) == 4
    assert {row["r"] for row in rows} == {"1", "2"}


# ----------------------------------------------------------- formats

def test_json_mirrors_csv_columns(capsys):
    code, csv_out, _ = run_cli(capsys, "count", "--x", "5", "--h", "30", "--offsets", "0,4")
    code2, json_out, _ = run_cli(
        capsys, "count", "--x", "5", "--h", "30", "--offsets", "0,4", "--format", "json"
    )
    assert code == code2 == 0
    csv_rows = parse_csv(csv_out)
    json_rows = json.loads(json_out)
    assert list(json_rows[0].keys()) == list(csv_rows[0].keys())
    assert str(json_rows[0]["q"]) == csv_rows[0]["q"]


def test_csv_uses_lf_and_fifteen_digits(tmp_path):
    out = tmp_path / "rows.csv"
    code = main(["density", "--offsets", "0", "--prime-cutoff", "100000",
                 "--out", str(out)])
    assert code == 0
    data = out.read_bytes()
    assert b"\r" not in data
    text = data.decode()
    lower = text.strip().split("\n")[1].split(",")[3]
    assert len(lower.replace(".", "").replace("-", "").lstrip("0")) <= 15


def test_reruns_are_byte_identical(tmp_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for path in paths:
        assert main(["sweep", "--x", "1000,5000", "--h", "100", "--offsets", "0,1",
                     "--prime-cutoff", "100000", "--out", str(path)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_thread_count_does_not_change_output(tmp_path):
    paths = [tmp_path / "t1.csv", tmp_path / "t4.csv"]
    for path, threads in zip(paths, ("1", "4")):
        assert main(["count", "--x", "1_000_000", "--h", "200_000", "--offsets", "0,2",
                     "--threads", threads, "--out", str(path)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


# --------------------------------------------------------- exit codes

def test_usage_error_exit_code(capsys):
    assert main(["count", "--x", "0", "--offsets", "0"]) == 2  # missing --h
    capsys.readouterr()


def test_invalid_offsets_exit_code(capsys):
    code, _, err = run_cli(capsys, "count", "--x", "0", "--h", "10", "--offsets", "3,1")
    assert code == 2
    assert "offsets" in err


def test_invalid_window_exit_code(capsys):
    code, _, _ = run_cli(capsys, "count", "--x", "0", "--h", "0", "--offsets", "0")
    assert code == 2


def test_degenerate_selberg_exit_code(capsys):
    code, _, err = run_cli(
        capsys, "selberg", "--x", "100", "--h", "50", "--offsets", "0,1,2,3", "--z", "10"
    )
    assert code == 2
    assert "residues" in err


def test_contract_violation_exit_code(capsys, monkeypatch):
    import sqfree.cli as cli_module

    class DoctoredCert:
        certified = False
        exact_count = 99
        form_value = 1.0

    monkeypatch.setattr(cli_module, "quadratic_form_bound", lambda *a, **k: DoctoredCert())
    code, _, err = run_cli(
        capsys, "selberg", "--x", "100", "--h", "50", "--offsets", "0", "--z", "5"
    )
    assert code == 3
    assert "contract failure" in err


def test_regime_note_goes_to_stderr_not_rows(capsys):
    code, out, err = run_cli(
        capsys, "selberg", "--x", "100", "--h", "500", "--offsets", "0", "--z", "5"
    )
    assert code == 0
    assert "note:" in err
    assert "note:" not in out


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "sqfree", "count", "--x", "0", "--h", "10", "--offsets", "0"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.strip().split("\n")[1].endswith(",7")
