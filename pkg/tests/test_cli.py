import csv
import io
import json
from fractions import Fraction as F
from math import gcd

import pytest

from squaretile.cli import EXIT_CONSTRUCTION, EXIT_INVALID, EXIT_OK, EXIT_USAGE, main
from squaretile.tiler import tiling_from_json


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_tile_greedy_two_by_three(capsys):
    code, out, _ = run(capsys, "tile", "--p", "2", "--q", "3", "--algorithm", "greedy")
    rep = json.loads(out)
    assert code == EXIT_OK
    assert rep["square_count"] == 3 and rep["valid"] and rep["complete"]
    assert rep["resistance_check"] == {"r": "2/3", "expected": "2/3", "kappa": "3",
                                       "kappa_ab": "2", "passed": True}
    assert rep["bounds"]["lower_bound_passed"] and rep["bounds"]["ceil_log2_q"] == 2


def test_tile_unit_square(capsys):
    code, out, _ = run(capsys, "tile", "--p", "1", "--q", "1")
    assert code == EXIT_OK and json.loads(out)["square_count"] == 1


def test_tile_kenyon_with_trace(capsys):
    code, out, _ = run(capsys, "tile", "--p", "233", "--q", "377", "--trace")
    rep = json.loads(out)
    assert code == EXIT_OK and rep["algorithm"] == "kenyon"
    assert rep["bounds"]["within_upper"]
    assert set(rep["trace"]) == {"events", "stages", "counters", "arrivals", "actions"}


def test_tile_epsilon_reports_residual(capsys):
    code, out, _ = run(capsys, "tile", "--x", "577/100", "--epsilon", "1/10")
    rep = json.loads(out)
    assert code == EXIT_OK and not rep["complete"]
    assert "resistance_check" not in rep and F(rep["bounds"]["residual_area"]) > 0


@pytest.mark.parametrize("argv", [
    ["tile", "--p", "2"],
    ["tile", "--p", "0", "--q", "3"],
    ["tile", "--x", "3/2"],
    ["tile", "--x", "3/2", "--epsilon", "1/10", "--algorithm", "greedy"],
    ["tile", "--p", "2", "--q", "3", "--algorithm", "epsilon"],
    ["tile", "--bogus"],
    ["frobnicate"],
    ["bench", "--every", "0"],
    ["stats", "--epsilons", "abc"],
    ["stats", "--samples", "0"],
])
def test_usage_errors_exit_one(capsys, argv):
    assert run(capsys, *argv)[0] == EXIT_USAGE


def test_help_exits_zero(capsys):
    assert run(capsys, "--help")[0] == EXIT_OK


def test_construction_failure_exits_three(capsys, monkeypatch):
    from squaretile import cli
    from squaretile.tiler import ConstructionError

    def boom(*a, **k):
        raise ConstructionError("forced")

    monkeypatch.setattr(cli, "kenyon_tile", boom)
    code, _, err = run(capsys, "tile", "--p", "2", "--q", "3")
    assert code == EXIT_CONSTRUCTION and "construction failed" in err


def test_verify_round_trip(capsys, tmp_path):
    path = tmp_path / "t.json"
    assert run(capsys, "tile", "--p", "55", "--q", "89", "--out", str(path))[0] == EXIT_OK
    code, out, _ = run(capsys, "verify", str(path))
    assert code == EXIT_OK and json.loads(out)["valid"]


def test_verify_overlap_exits_two(capsys, tmp_path):
    path = tmp_path / "t.json"
    run(capsys, "tile", "--p", "2", "--q", "3", "--algorithm", "greedy", "--out", str(path))
    doc = json.loads(path.read_text())
    doc["squares"][1]["x"] = doc["squares"][0]["x"]
    doc["squares"][1]["y"] = doc["squares"][0]["y"]
    path.write_text(json.dumps(doc))
    code, out, err = run(capsys, "verify", str(path))
    assert code == EXIT_INVALID and "overlap" in err
    assert not json.loads(out)["valid"]


def test_verify_unreadable_exits_one(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "verify", str(bad))[0] == EXIT_USAGE
    assert run(capsys, "verify", str(tmp_path / "missing.json"))[0] == EXIT_USAGE


@pytest.mark.parametrize("algo", ["greedy", "kenyon", "kenyon-baseline"])
def test_tile_then_verify_every_algorithm(capsys, tmp_path, algo):
    for p, q in [(1, 7), (3, 5), (8, 13), (21, 34), (40, 17)]:
        path = tmp_path / f"{algo}-{p}-{q}.json"
        code, out, _ = run(capsys, "tile", "--p", str(p), "--q", str(q), "--algorithm", algo,
                           "--out", str(path))
        assert code == EXIT_OK
        count = json.loads(out)["square_count"]
        code, out, _ = run(capsys, "verify", str(path))
        assert code == EXIT_OK and json.loads(out)["square_count"] == count


def test_outputs_are_byte_identical(capsys, tmp_path):
    blobs = []
    for i in range(2):
        j, s = tmp_path / f"{i}.json", tmp_path / f"{i}.svg"
        run(capsys, "tile", "--x", "987/610", "--epsilon", "1/1000", "--out", str(j), "--svg", str(s))
        blobs.append((j.read_bytes(), s.read_bytes()))
    assert blobs[0] == blobs[1]
    t = tiling_from_json(blobs[0][0].decode())
    assert t.width == F(987, 610)
    assert b"<svg" in blobs[0][1]


def test_bench_empty_range(capsys):
    code, out, _ = run(capsys, "bench", "--min-q", "10", "--max-q", "5")
    assert code == EXIT_OK and out == "p,q,greedy,kenyon,excess\n"


def test_bench_fit_and_pin(capsys, tmp_path):
    pin = tmp_path / "pin.json"
    code, out, err = run(capsys, "bench", "--max-q", "20", "--fit", "--pin", str(pin))
    assert code == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == sum(1 for q in range(2, 21) for p in range(1, q) if gcd(p, q) == 1)
    assert all(int(r["kenyon"]) <= int(r["greedy"]) for r in rows)
    doc = json.loads(pin.read_text())
    assert doc == json.loads(err.strip().splitlines()[-1])
    C = F(doc["C"])
    for r in rows:
        if r["excess"]:
            assert float(r["excess"]) <= float(C) + 1e-6


def test_bench_parallel_matches_serial(capsys):
    serial = run(capsys, "bench", "--max-q", "30", "--every", "3")[1]
    parallel = run(capsys, "bench", "--max-q", "30", "--every", "3", "--jobs", "2")[1]
    assert serial == parallel


def test_oracle_table(capsys, tmp_path):
    out_path = tmp_path / "o.csv"
    code, _, _ = run(capsys, "oracle", "--max-q", "8", "--out", str(out_path))
    lines = out_path.read_text().splitlines()
    assert code == EXIT_OK and lines[0] == "p,q,min_count,witness_json"
    assert any(line.startswith("2,3,3,") for line in lines)


def test_stats_determinism_and_csv(capsys, tmp_path, monkeypatch):
    csv_path = tmp_path / "s.csv"
    monkeypatch.setenv("SQUARETILE_SEED", "5")
    code, a, _ = run(capsys, "stats", "--samples", "40", "--epsilons", "1e-3,1e-6", "--csv", str(csv_path))
    _, b, _ = run(capsys, "stats", "--samples", "40", "--epsilons", "1e-3,1e-6", "--seed", "5")
    assert code == EXIT_OK and a == b
    doc = json.loads(a)
    assert [s["epsilon"] for s in doc["summaries"]] == ["1/1000", "1/1000000"]
    assert len(csv_path.read_text().splitlines()) == 1 + 80


def test_stats_bad_seed_env(capsys, monkeypatch):
    monkeypatch.setenv("SQUARETILE_SEED", "notanint")
    assert run(capsys, "stats", "--samples", "3")[0] == EXIT_USAGE
