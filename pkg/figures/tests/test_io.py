"""Loading and provenance enforcement."""

import json

import pytest

from vzbwfig.io import FigureInputError, load_table, sidecar_path


def test_sidecar_path():
    assert sidecar_path("out/velocity.csv") == "out/velocity.meta.json"


def test_load_golden_velocity(golden):
    table = load_table(str(golden / "velocity.csv"))
    assert table.header == ("t", "vx", "vy", "vz")
    assert tuple(table.meta["columns"]) == table.header
    assert len(table.rows) > 0
    assert table.column("t")[0] == "0"
    ts = table.floats("t")
    assert ts[0] == 0.0
    assert ts == sorted(ts)


def test_missing_csv(tmp_path):
    with pytest.raises(FigureInputError, match="input not found"):
        load_table(str(tmp_path / "nope.csv"))


def test_missing_sidecar(golden, tmp_path):
    bare = tmp_path / "velocity.csv"
    bare.write_bytes((golden / "velocity.csv").read_bytes())
    with pytest.raises(FigureInputError, match="missing provenance sidecar"):
        load_table(str(bare))


def test_corrupt_sidecar(work):
    (work / "velocity.meta.json").write_text("not json at all\n")
    with pytest.raises(FigureInputError, match="unreadable sidecar"):
        load_table(str(work / "velocity.csv"))


def test_sidecar_not_an_object(work):
    (work / "velocity.meta.json").write_text("[1, 2]\n")
    with pytest.raises(FigureInputError, match="not a JSON object"):
        load_table(str(work / "velocity.csv"))


def test_sidecar_without_columns(work):
    meta_path = work / "velocity.meta.json"
    meta = json.loads(meta_path.read_text())
    del meta["columns"]
    meta_path.write_text(json.dumps(meta))
    with pytest.raises(FigureInputError, match="lacks a 'columns' entry"):
        load_table(str(work / "velocity.csv"))


def test_tampered_header_rejected(work):
    csv_path = work / "velocity.csv"
    lines = csv_path.read_text().splitlines()
    lines[0] = "t,vx,vy,speed"
    csv_path.write_text("\n".join(lines) + "\n")
    with pytest.raises(FigureInputError, match="does not match sidecar"):
        load_table(str(csv_path))


def test_ragged_row_rejected(work):
    csv_path = work / "fit.csv"
    with open(csv_path, "a", encoding="utf-8") as fh:
        fh.write("1.0,2.0\n")
    with pytest.raises(FigureInputError, match="line 3 has 2 fields"):
        load_table(str(csv_path))


def test_unknown_column(golden):
    table = load_table(str(golden / "velocity.csv"))
    with pytest.raises(FigureInputError, match="no column named 'vr'"):
        table.column("vr")


def test_non_numeric_floats(golden):
    table = load_table(str(golden / "report.csv"))
    with pytest.raises(FigureInputError, match="non-numeric"):
        table.floats("verdict")
    assert all(v >= 0.0 for v in table.floats("rel_deviation"))
