import json

import pytest

from truncweil.cli import EXIT_CONFIG, EXIT_OK, main
from truncweil.records import SCHEMA_VERSION, CellRecord, SchemaError, load_document, records_from_files, strip_timing
from truncweil.runner import run_cell, run_sweep
from truncweil.weil_kernel import CutoffSpec

SMALL = ["--N", "6", "--T", "30", "--dps", "30", "--window", "5", "30", "--count", "3", "--jobs", "1"]


@pytest.fixture(scope="module")
def small_record():
    return run_cell(CutoffSpec(11, 30, 6, 30), count=3, window=(5, 30))


def test_record_round_trip_bytewise(cells):
    rec = cells(13, 30).record
    text = rec.to_json()
    assert CellRecord.from_json(text).to_json() == text


def test_lambda_parses_to_identical_binary(cells):
    cell = cells(13, 30)
    i = cell.result.smallest_positive_index
    mp = cell.spec.ctx.mp
    assert mp.mpf(cell.record.lambda_even) == cell.result.eigenvalues[i]
    assert [mp.mpf(x) for x in cell.record.spectrum] == list(cell.result.eigenvalues)


def test_record_fields(small_record):
    d = small_record.to_dict()
    assert d["schema_version"] == SCHEMA_VERSION
    assert d["status"] in ("ok", "negative-lambda-min", "no-positive-eigenvalue")
    assert d["backend"] in ("python", "cython-gmp")
    assert len(d["spectrum"]) == 7 and len(d["eigenvector"]) == 7


def test_schema_versions(small_record):
    d = small_record.to_dict()
    d["schema_version"] = "1.7"
    CellRecord.from_dict(d)
    for bad in ("2.0", None, "1"):
        d["schema_version"] = bad
        with pytest.raises(SchemaError):
            CellRecord.from_dict(d)
    d["schema_version"] = SCHEMA_VERSION
    del d["c"]
    with pytest.raises(SchemaError):
        CellRecord.from_dict(d)


def test_future_major_rejected_by_cli(tmp_path, small_record):
    d = small_record.to_dict()
    d["schema_version"] = "2.0"
    p = tmp_path / "rec.json"
    p.write_text(json.dumps(d))
    assert main(["zeros", str(p)]) == EXIT_CONFIG
    with pytest.raises(SchemaError):
        load_document(str(p))


def test_sweep_independent_of_jobs():
    specs = [CutoffSpec(c, 30, 6, 30) for c in (7, 11, 13)]
    kw = {"count": 3, "window": (5, 30)}
    a = run_sweep(specs, jobs=1, **kw)
    b = run_sweep(specs, jobs=2, **kw)
    assert strip_timing(a) == strip_timing(b)
    assert [r["c"] for r in a["cells"]] == ["7", "11", "13"]
    assert a["failures"] == []


def test_single_cutoff_sweep_is_one_row(small_record):
    from truncweil.analysis import dataset_from_records

    doc = run_sweep([CutoffSpec(11, 30, 6, 30)], jobs=1, count=3, window=(5, 30))
    assert len(dataset_from_records(doc["cells"])) == 1
    assert strip_timing(doc["cells"][0]) == strip_timing(small_record.to_dict())


@pytest.mark.slow
def test_floor_flag_at_c19(cells):
    # at dps 80 the c=19 eigenvalue sits below the 10**-dps * ||Q|| floor, c=13 does not
    r19 = cells(19, 100).record
    r13 = cells(13, 100).record
    assert r19.below_floor is True and r13.below_floor is False
    assert float(r19.lambda_even) < float(r19.floor)


def test_sweep_isolates_failures():
    # count=0 is rejected inside each cell; the sweep reports instead of raising
    doc = run_sweep([CutoffSpec(c, 30, 6, 30) for c in (7, 11)], jobs=1, count=0)
    assert doc["cells"] == [] and len(doc["failures"]) == 2
    assert "ValueError" in doc["failures"][0]["error"]
    with pytest.raises(ValueError):
        run_sweep([])


def test_cell_and_zeros_commands(tmp_path, capsys):
    out = tmp_path / "c11.json"
    assert main(["cell", "--c", "11", *SMALL, "--out", str(out)]) == EXIT_OK
    rec = CellRecord.from_json(out.read_text())
    assert rec.c == "11" and rec.N == 6
    table = tmp_path / "z.txt"
    assert main(["zeros", str(out), "--out", str(table)]) == EXIT_OK
    assert "gamma" in table.read_text()
    sweep = tmp_path / "s.json"
    assert main(["sweep", "7", "11", *SMALL, "--out", str(sweep)]) == EXIT_OK
    assert len(records_from_files([str(sweep), str(out)])) == 3


def test_predict(capsys):
    assert main(["predict", "100"]) == EXIT_OK
    text = capsys.readouterr().out
    assert "-530.38" in text and "-545.75" in text
    assert main(["predict", "13"]) == EXIT_OK
    at13 = float(capsys.readouterr().out.split()[-1])
    assert at13 > -530.38
    assert main(["predict", "1.0"]) == EXIT_CONFIG


def test_analyze_fixture_selectors(tmp_path, capsys):
    assert main(["analyze", "aitken"]) == EXIT_OK
    assert "0.837" in capsys.readouterr().out
    assert main(["analyze", "classify", "--delta", "-10.18"]) == EXIT_OK
    assert "Ambiguous partial floor" in capsys.readouterr().out
    csv_path = tmp_path / "m.csv"
    assert main(["analyze", "models", "--csv", str(csv_path)]) == EXIT_OK
    lines = csv_path.read_text().splitlines()
    assert lines[0].startswith("model,") and len(lines) == 9
    assert all(line.endswith("FAIL") for line in lines[1:])
    for sel in ("logperiodic", "steps", "coupling", "powerlaw", "sobolev"):
        assert main(["analyze", sel]) == EXIT_OK, sel


def test_analyze_errors(capsys):
    assert main(["analyze", "overlaps"]) == EXIT_CONFIG
    assert main(["analyze", "classify"]) == EXIT_CONFIG
    assert main(["analyze", "bogus"]) == EXIT_CONFIG
    assert main(["analyze", "models", "--dataset", "/nonexistent.json"]) == EXIT_CONFIG
    assert main(["cell", "--c", "1", *SMALL]) == EXIT_CONFIG
    assert main(["cell", "--c", "11", "--jobs", "0"]) == EXIT_CONFIG


def test_analyze_on_records(tmp_path):
    sweep = tmp_path / "s.json"
    assert main(["sweep", "7", "11", "13", *SMALL, "--out", str(sweep)]) == EXIT_OK
    for sel in ("overlaps", "pca"):
        out = tmp_path / (sel + ".txt")
        assert main(["analyze", sel, "--dataset", str(sweep), "--out", str(out)]) == EXIT_OK
        assert out.read_text().strip()
