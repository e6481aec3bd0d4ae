import csv
import json

import pytest

from dqi_bench import read_instance, read_xorsat, write_instance
from dqi_bench.cli import main


@pytest.fixture()
def ex1_file(tmp_path, ex1):
    path = tmp_path / "ex1.json"
    write_instance(ex1, path)
    return str(path)


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out.strip()
    summary = json.loads(out.splitlines()[-1]) if code == 0 and out else None
    return code, summary


def test_gen(tmp_path, capsys):
    out = tmp_path / "inst.json"
    code, summary = run_cli(capsys, "gen", "--n-cars", "5", "--seed", "7", "-o", str(out))
    assert code == 0
    inst = read_instance(out)
    assert inst.n_cars == 5
    assert summary["digest"]


def test_gen_idempotent(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["gen", "--n-cars", "6", "--seed", "3", "-o", str(a)]) == 0
    assert main(["gen", "--n-cars", "6", "--seed", "3", "-o", str(b)]) == 0
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()


def test_encode_reduced_worked_example(tmp_path, capsys, ex1_file, ex1_reduced):
    out = tmp_path / "xs.json"
    code, summary = run_cli(
        capsys, "encode", "--encoding", "icc", "--reduce", "-i", ex1_file, "-o", str(out)
    )
    assert code == 0
    assert summary["n_vars"] == 4 and summary["m"] == 5
    assert summary["removed_constraints"] == [1, 2, 6, 7]
    assert summary["forced_swaps"] == 2
    assert read_xorsat(out) == ex1_reduced[0]


def test_distance(tmp_path, capsys, ex1_file):
    xs = tmp_path / "xs.json"
    main(["encode", "--encoding", "icc", "--reduce", "-i", ex1_file, "-o", str(xs)])
    capsys.readouterr()
    code, summary = run_cli(capsys, "distance", "-i", str(xs))
    assert code == 0
    assert summary["code_distance"] == 2 and not summary["exceeds_cap"]


def test_decode_stats(tmp_path, capsys, ex1_file):
    xs = tmp_path / "xs.json"
    prof = tmp_path / "prof.json"
    main(["encode", "--encoding", "icc", "--reduce", "-i", ex1_file, "-o", str(xs)])
    capsys.readouterr()
    code, summary = run_cli(
        capsys, "decode-stats", "-i", str(xs), "--decoder", "greedy",
        "--l", "1", "--mode", "exact", "-o", str(prof),
    )
    assert code == 0
    assert summary["eps"] == [0.0, 0.2]
    assert json.loads(prof.read_text())["eps"] == [0.0, 0.2]


def test_circuit(tmp_path, capsys, ex1_file):
    xs = tmp_path / "xs.json"
    circ = tmp_path / "circuit.txt"
    main(["encode", "--encoding", "icc", "--reduce", "-i", ex1_file, "-o", str(xs)])
    capsys.readouterr()
    code, summary = run_cli(capsys, "circuit", "-i", str(xs), "-o", str(circ))
    assert code == 0
    lines = circ.read_text().splitlines()
    assert lines[0] == "REGISTERS syndrome=4 path=6 error=5"
    assert lines[1] == "CCX v:1 v:2 p:1"
    assert summary["ccx"] == 6 and summary["cx"] == 32 and summary["leading_order"] == 8


def test_bench_exact_worked_example(tmp_path, capsys, ex1_file):
    report = tmp_path / "report.csv"
    code, summary = run_cli(
        capsys, "bench", "--mode", "exact", "--decoder", "greedy",
        "--l", "1", "-i", ex1_file, "-o", str(report),
    )
    assert code == 0
    assert summary["p_opt"][0] == pytest.approx(7 / 24, abs=1e-12)
    with open(report) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 1
    assert float(rows[0]["p_opt"]) == pytest.approx(7 / 24, abs=1e-12)
    assert rows[0]["code_distance"] == "2"
    assert json.loads(rows[0]["eps_json"]) == [0.0, 0.2]


def test_bench_both_decoders_idempotent(tmp_path, capsys, ex1_file):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    argv = ["bench", "--mode", "approx", "--samples", "40", "--seed", "9",
            "--decoder", "both", "-i", ex1_file]
    assert main(argv + ["-o", str(a)]) == 0
    assert main(argv + ["-o", str(b)]) == 0
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()
    with open(a) as fh:
        rows = list(csv.DictReader(fh))
    assert [r["decoder"] for r in rows] == ["greedy", "min-length"]


def test_bench_generates_when_asked(tmp_path, capsys):
    report = tmp_path / "r.csv"
    code, summary = run_cli(
        capsys, "bench", "--n-cars", "4", "--seed", "2", "--mode", "approx",
        "--samples", "30", "-o", str(report),
    )
    assert code == 0 and report.exists()
    assert summary["rows"] == 1


def test_sweep(tmp_path, capsys, ex1_file):
    out = tmp_path / "sweep.csv"
    code, summary = run_cli(
        capsys, "sweep", "-i", ex1_file, "--profile", "exact", "-o", str(out),
    )
    assert code == 0
    assert "greedy" in summary["l_star"]
    lines = out.read_text().splitlines()
    assert lines[0] == "n_cars,decoder,l,p_opt_tilde"
    assert len(lines) == 1 + 4  # degrees 1..min(n, m) = 4


def test_validate_approx(tmp_path, capsys):
    out = tmp_path / "va.csv"
    agg = tmp_path / "agg.csv"
    code, summary = run_cli(
        capsys, "validate-approx", "--n-list", "2,3", "--instances", "1",
        "--samples", "25", "--seed", "8", "-o", str(out), "--aggregate-out", str(agg),
    )
    assert code == 0
    assert summary["rows"] == 4
    assert set(summary["geomean_ratios"]) == {"2", "3"}
    assert agg.exists()


def test_export_lp(tmp_path, capsys, ex1_file):
    xs = tmp_path / "xs.json"
    lp = tmp_path / "out.lp"
    main(["encode", "--encoding", "icc", "--reduce", "-i", ex1_file, "-o", str(xs)])
    capsys.readouterr()
    code, summary = run_cli(capsys, "export-lp", "-i", str(xs), "-o", str(lp))
    assert code == 0
    assert summary["lp_variables"] == 9
    assert lp.read_text().startswith("Maximize")


def test_help_exits_zero(capsys):
    assert main(["--help"]) == 0
    for sub in ("gen", "encode", "distance", "decode-stats", "circuit",
                "bench", "sweep", "validate-approx", "export-lp"):
        assert main([sub, "--help"]) == 0
        help_text = capsys.readouterr().out
        assert sub in help_text or "usage" in help_text


def test_unknown_flag_exits_64(capsys):
    assert main(["gen", "--does-not-exist", "-o", "x"]) == 64
    assert main(["frobnicate"]) == 64


def test_validation_error_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"n_cars": 2, "sequence": [1, 1, 1, 2]}))
    report = tmp_path / "r.csv"
    assert main(["bench", "-i", str(bad), "-o", str(report)]) == 2
    assert main(["bench", "-o", str(report)]) == 2  # neither -i nor --n-cars
    assert main(["bench", "--n-cars", "40", "--mode", "exact", "-o", str(report)]) == 2


def test_capacity_error_exits_3(tmp_path, capsys):
    report = tmp_path / "r.csv"
    code = main(
        ["bench", "--n-cars", "40", "--seed", "1", "--mode", "exact",
         "--force", "-o", str(report)]
    )
    assert code == 3


def test_missing_file_exits_2(tmp_path, capsys):
    assert main(["encode", "-i", str(tmp_path / "nope.json"), "-o", "x"]) == 2
