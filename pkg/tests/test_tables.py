import json

import pytest

from cliffhier.cli.tables import CYCLE_TABLE_SHAPES, ClassDatabase, TableArtifact, cell_text, census_table, \
    cycle_table, emit_table, parse_shape, shape_key
from cliffhier.common.errors import MissingDatabaseError
from cliffhier.core.affine_classify.affine_classify import ExtensionReport, classify_cycle_structures, \
    count_ae_classes_full

EXPECTED_ROW_3 = ["3", "1/1", "1/1", "0/1", "1/2", "1/2", "0/1", "1/2", "1/2", "1/2", "1/2", "1/2"]


@pytest.fixture(scope="module")
def small_cells():
    return {shape: {n: classify_cycle_structures(n, shape) for n in (1, 2, 3) if sum(shape) <= 1 << n}
            for _, shape in CYCLE_TABLE_SHAPES if shape}


def _fill(db, cells, unresolved_shape=None):
    # rows 4 and 5 reuse the three-qubit records; only the layout is under test here
    for shape, by_n in cells.items():
        for n, records in by_n.items():
            db.save_cell(n, shape, records)
        db.save_cell(4, shape, by_n[3])
        pairs = [("(7,6)", "(5,4)")] if shape == unresolved_shape else []
        db.save_extension(ExtensionReport(5, shape, by_n[3], pairs))


def test_shape_helpers():
    assert parse_shape("(2,3)") == (3, 2)
    assert parse_shape("2, 2") == (2, 2)
    assert shape_key((2, 3)) == "3-2"
    assert shape_key(()) == "id"
    with pytest.raises(ValueError):
        parse_shape("1,2")


def test_cell_text():
    assert cell_text([]) == "0"
    assert cell_text(None) == "0"


def test_artifact_formats():
    table = TableArtifact("t", ["n", "x"], [["1", "2/3"]], ["note"])
    assert table.render("csv") == "n,x\n1,2/3\n"
    assert json.loads(table.render("json"))["rows"] == [["1", "2/3"]]
    md = table.render("md")
    assert "| 1 | 2/3 |" in md and md.rstrip().endswith("note")
    with pytest.raises(ValueError):
        table.render("xml")


def test_census_round_trip(tmp_path):
    db = ClassDatabase(tmp_path)
    assert db.load_census(2) is None
    report = count_ae_classes_full(2)
    db.save_census(report)
    loaded = db.load_census(2)
    assert [r.notation for r in loaded] == [r.notation for r in report.classes]
    assert [r.level for r in loaded] == [r.level for r in report.classes]
    assert loaded[0].profile.spectra() == report.classes[0].profile.spectra()


def test_cell_round_trip(tmp_path, small_cells):
    db = ClassDatabase(tmp_path)
    records = small_cells[(4,)][3]
    db.save_cell(3, (4,), records)
    loaded = db.load_cell(3, (4,))
    assert [r.to_dict() for r in loaded] == [r.to_dict() for r in records]
    assert cell_text(loaded) == "1/2"


def test_census_table_needs_every_row(tmp_path):
    db = ClassDatabase(tmp_path)
    db.save_census(count_ae_classes_full(1))
    with pytest.raises(MissingDatabaseError, match="classify-perms --qubits 2"):
        census_table(db)


def test_cycle_table_layout(tmp_path, small_cells):
    db = ClassDatabase(tmp_path)
    _fill(db, small_cells)
    table = cycle_table(db)
    assert table.header == ["n"] + [label for label, _ in CYCLE_TABLE_SHAPES]
    assert [row[0] for row in table.rows] == ["1", "2", "3", "4", "≥5"]
    assert table.rows[0] == ["1", "1/1", "1/1"] + ["0"] * 9
    assert table.rows[1] == ["2", "1/1", "1/1", "1/1", "1/1", "1/1"] + ["0"] * 6
    assert table.rows[2] == EXPECTED_ROW_3
    assert not table.notes


def test_unresolved_cells_are_flagged(tmp_path, small_cells):
    db = ClassDatabase(tmp_path)
    _fill(db, small_cells, unresolved_shape=(2, 2, 2))
    table = cycle_table(db)
    assert table.rows[-1][-1] == "1/2*"
    assert table.notes == ["* (2,2,2): 1 pair(s) left unresolved"]
    assert "1/2*" in emit_table(3, "md", db)
