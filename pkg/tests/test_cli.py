"""CLI surface: column orders, anchor rows, exit codes, determinism."""

import csv
import json
import math

import pytest

from semicycles.analysis import Classification
from semicycles.cli import DEFAULT_SEED, RunConfig, main
from semicycles.errors import DomainError
from semicycles.integrator import problem_to_dict
from semicycles.repro import ExampleSpec, build_example_problem

SQRT2 = math.sqrt(2.0)


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("SEMICYCLE_CACHE_DIR", str(tmp_path / "cache"))


@pytest.fixture()
def problem_file(tmp_path):
    prob = build_example_problem(ExampleSpec("example3", 0.05, 10))
    path = tmp_path / "problem.json"
    path.write_text(json.dumps(problem_to_dict(prob)))
    return str(path)


def _read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_thresholds_anchor_rows(tmp_path):
    out = tmp_path / "thr.csv"
    assert main(["thresholds", "--delta", "0:3:0.1", "--out", str(out)]) == 0
    rows = {float(r["delta"]): r for r in _read_csv(str(out))}
    assert len(rows) == 31
    r0 = rows[0.0]
    assert math.isclose(float(r0["theta"]), math.pi / 2, abs_tol=1e-6)
    assert math.isclose(float(r0["psi"]), math.pi / 2, abs_tol=2e-3)
    assert math.isclose(float(r0["threshold"]), math.pi, abs_tol=2e-3)
    r29 = rows[2.9]
    assert math.isclose(float(r29["theta"]), SQRT2, abs_tol=1e-9)
    assert math.isclose(float(r29["psi"]), SQRT2, abs_tol=2e-3)
    assert math.isclose(float(r29["threshold"]), 2 * SQRT2, abs_tol=2e-3)


def test_threshold_grid_single_cells(tmp_path):
    out = tmp_path / "cell.csv"
    assert main(["thresholds", "--delta", "0", "--rho", "1",
                 "--out", str(out)]) == 0
    (row,) = _read_csv(str(out))
    assert list(row) == ["delta", "rho", "theta", "psi"]
    assert math.isclose(float(row["psi"]), math.pi / 2, abs_tol=2e-3)

    assert main(["thresholds", "--delta", "3", "--rho", "1",
                 "--out", str(out)]) == 0
    (row,) = _read_csv(str(out))
    assert math.isclose(float(row["psi"]), SQRT2, abs_tol=2e-3)


def test_threshold_grid_monotone_both_axes(tmp_path):
    out = tmp_path / "grid.csv"
    assert main(["thresholds", "--delta", "0:3:0.75", "--rho", "0.5:2.5:0.5",
                 "--grid", "1024", "--out", str(out)]) == 0
    rows = _read_csv(str(out))
    assert len(rows) == 25
    table = {(float(r["delta"]), float(r["rho"])): float(r["psi"])
             for r in rows}
    deltas = sorted({d for d, _ in table})
    rhos = sorted({r for _, r in table})
    for r in rhos:
        for lo, hi in zip(deltas, deltas[1:]):
            assert table[(hi, r)] <= table[(lo, r)] + 1e-9
    for d in deltas:
        for lo, hi in zip(rhos, rhos[1:]):
            assert table[(d, hi)] <= table[(d, lo)] + 1e-9


def test_cache_hit_replays_fresh_bytes(tmp_path):
    args = ["thresholds", "--delta", "0:2:1", "--rho", "0.5:1.5:0.5",
            "--grid", "512"]
    fresh, cached, refresh = (tmp_path / n for n in ("a.csv", "b.csv",
                                                     "c.csv"))
    assert main(args + ["--out", str(fresh)]) == 0
    cache_dir = tmp_path / "cache"
    assert any(cache_dir.glob("table-*.json"))
    assert main(args + ["--out", str(cached)]) == 0
    assert cached.read_bytes() == fresh.read_bytes()
    # wipe the cache: a recomputation must reproduce the same bytes
    for f in cache_dir.glob("table-*.json"):
        f.unlink()
    assert main(args + ["--out", str(refresh)]) == 0
    assert refresh.read_bytes() == fresh.read_bytes()


def test_repro_error_column_small(tmp_path):
    out = tmp_path / "repro.csv"
    assert main(["repro", "example3", "--epsilon", "0", "--periods", "3",
                 "--out", str(out)]) == 0
    rows = _read_csv(str(out))
    assert list(rows[0]) == ["t", "closed_form", "integrated", "error"]
    assert max(float(r["error"]) for r in rows) < 1e-6


def test_spectrum_frozen_table(tmp_path):
    out = tmp_path / "spec.csv"
    assert main(["spectrum", "--delay", "4", "--sign", "+",
                 "--branches", "0..2", "--out", str(out)]) == 0
    rows = _read_csv(str(out))
    got = {(round(float(r["re"]), 2), round(float(r["im"]), 2))
           for r in rows}
    assert got == {(0.34, 0.37), (-0.21, 1.5), (-0.57, 3.05),
                   (-0.77, 4.63), (-0.92, 6.21)}
    assert all(float(r["residual"]) < 1e-10 for r in rows)
    assert all(r["semicycle"] != "" for r in rows)


def test_spectrum_real_root_leaves_semicycle_blank(tmp_path):
    out = tmp_path / "spec.csv"
    assert main(["spectrum", "--delay", "1", "--sign", "-",
                 "--branches", "0", "--out", str(out)]) == 0
    rows = _read_csv(str(out))
    real = [r for r in rows if abs(float(r["im"])) < 1e-9]
    assert real and all(r["semicycle"] == "" for r in real)
    assert all(float(r["re"]) > 0 for r in real)


def test_simulate_csv_and_svg(tmp_path, problem_file):
    out, svg = tmp_path / "sim.csv", tmp_path / "sim.svg"
    assert main(["simulate", "--problem", problem_file, "--horizon", "12",
                 "--out", str(out), "--svg", str(svg)]) == 0
    rows = _read_csv(str(out))
    assert list(rows[0]) == ["t", "x", "dx"]
    assert float(rows[0]["t"]) == 0.0
    assert math.isclose(float(rows[0]["dx"]), SQRT2, rel_tol=1e-12)
    text = svg.read_text()
    assert text.startswith("<svg") and "<path" in text


def test_classify_json_document(tmp_path, problem_file):
    out = tmp_path / "verdict.json"
    assert main(["classify", "--problem", problem_file, "--horizon", "28",
                 "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["verdict"] in Classification.VERDICTS
    assert doc["semicycles"], "expected extracted arcs"
    assert set(doc["semicycles"][0]) == {"a", "b", "w", "peak", "sign"}
    assert all(len(item) == 3 for item in doc["evidence"])


def test_hand_authored_problem_schema(tmp_path):
    # the documented schema, written by hand rather than via problem_to_dict
    doc = {
        "p": {"breakpoints": [0.0, 40.0], "segments": [[1.0]],
              "left": 1.0, "right": 1.0},
        "tau": {"breakpoints": [0.0, 40.0], "segments": [[1.0]],
                "left": 1.0, "right": 1.0},
        "start": 0.0,
        "history": {"breakpoints": [-1.0, 0.0], "segments": [[1.0]],
                    "left": 1.0, "right": 1.0},
        "initial_value": 1.0,
        "initial_slope": 0.0,
    }
    path = tmp_path / "hand.json"
    path.write_text(json.dumps(doc))
    out = tmp_path / "verdict.json"
    assert main(["classify", "--problem", str(path), "--horizon", "40",
                 "--out", str(out)]) == 0
    assert json.loads(out.read_text())["verdict"] in Classification.VERDICTS


def test_malformed_json_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"p": [1,\n 2')
    assert main(["simulate", "--problem", str(bad)]) == 2
    err = capsys.readouterr().err
    assert "line" in err and "column" in err


def test_schema_violation_exits_1_naming_operation(tmp_path, capsys):
    partial = tmp_path / "partial.json"
    partial.write_text('{"start": 0.0}')
    assert main(["simulate", "--problem", str(partial)]) == 1
    assert "problem_from_dict" in capsys.readouterr().err


def test_domain_error_names_originating_operation(problem_file, capsys):
    # far too short a window for any verdict
    assert main(["classify", "--problem", problem_file,
                 "--horizon", "2"]) == 1
    assert "classify" in capsys.readouterr().err


def test_bad_range_is_a_parse_error():
    with pytest.raises(SystemExit) as exc:
        main(["thresholds", "--delta", "3:0:0.1"])
    assert exc.value.code == 2


def test_harness_reruns_and_jobs_are_byte_identical(tmp_path):
    a, b, c = (tmp_path / n for n in ("h1.csv", "h2.csv", "h3.csv"))
    base = ["harness", "wronskian", "--seed", "7", "--instances", "4"]
    assert main(base + ["--out", str(a)]) == 0
    assert main(base + ["--out", str(b)]) == 0
    assert main(base + ["--jobs", "2", "--out", str(c)]) == 0
    assert a.read_bytes() == b.read_bytes() == c.read_bytes()


def test_runconfig_validates_numerics():
    with pytest.raises(DomainError):
        RunConfig(subcommand="simulate", step=-0.01)
    with pytest.raises(DomainError):
        RunConfig(subcommand="nonsense")
    with pytest.raises(DomainError):
        RunConfig(subcommand="repro", periods=0)
    assert RunConfig(subcommand="harness").seed == DEFAULT_SEED


def test_repro_accepts_sin_alias(tmp_path):
    out = tmp_path / "sin.csv"
    assert main(["repro", "sin", "--periods", "1", "--out", str(out)]) == 0
    rows = _read_csv(str(out))
    assert max(float(r["error"]) for r in rows) < 1e-6
