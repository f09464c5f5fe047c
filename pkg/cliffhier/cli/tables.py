import csv
import io
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from ..common.errors import MissingDatabaseError
from ..config.path import cache_dir
from ..core.affine_classify.affine_classify import CensusReport, ClassRecord, EquivalenceAction, ExtensionReport
from ..utils import json_util

logger = logging.getLogger("ClassDatabase")

CONVENTION = "qubit 0 is the most significant bit of the state index"

# column order of the cycle-type table, first entry is the identity
CYCLE_TABLE_SHAPES: Tuple[Tuple[str, Tuple[int, ...]], ...] = (
    ("Id", ()),
    ("(2)", (2,)),
    ("(3)", (3,)),
    ("(4)", (4,)),
    ("(2,2)", (2, 2)),
    ("(5)", (5,)),
    ("(2,3)", (3, 2)),
    ("(6)", (6,)),
    ("(4,2)", (4, 2)),
    ("(3,3)", (3, 3)),
    ("(2,2,2)", (2, 2, 2)),
)
DIRECT_ROWS = (1, 2, 3, 4)
EXTENDED_ROW = 5


def shape_key(shape: Sequence[int]) -> str:
    return "-".join(str(k) for k in sorted(shape, reverse=True)) or "id"


def parse_shape(text: str) -> Tuple[int, ...]:
    parts = [p for p in text.replace("(", "").replace(")", "").split(",") if p.strip()]
    shape = tuple(sorted((int(p) for p in parts), reverse=True))
    if any(k < 2 for k in shape):
        raise ValueError(f"cycle lengths must be at least 2, got {text!r}")
    return shape


#region Class database
class ClassDatabase:
    """JSON files under the cache directory, one per census or per (n, shape) cell."""

    def __init__(self, root: Optional[Path] = None):
        self.root = Path(root) if root is not None else cache_dir()

    def _census_path(self, n: int) -> Path:
        return self.root / f"census_n{n}.json"

    def _cell_path(self, n: int, shape: Sequence[int]) -> Path:
        return self.root / f"cycles_n{n}_{shape_key(shape)}.json"

    def _extension_path(self, n: int, shape: Sequence[int]) -> Path:
        return self.root / f"extension_n{n}_{shape_key(shape)}.json"

    def save_census(self, report: CensusReport) -> Path:
        data = {"convention": CONVENTION, "n": report.n, "total_permutations": report.total_permutations,
                "classes": [r.to_dict() for r in report.classes]}
        path = json_util.dump(data, self._census_path(report.n))
        logger.info("Saved census n=%d to %s", report.n, path)
        return path

    def load_census(self, n: int) -> Optional[List[ClassRecord]]:
        data = json_util.load(self._census_path(n))
        if data is None:
            return None
        return [ClassRecord.from_dict(n, EquivalenceAction.TWO_SIDED, d) for d in data["classes"]]

    def save_cell(self, n: int, shape: Sequence[int], records: Sequence[ClassRecord]) -> Path:
        data = {"convention": CONVENTION, "n": n, "shape": list(shape), "classes": [r.to_dict() for r in records]}
        path = json_util.dump(data, self._cell_path(n, shape))
        logger.info("Saved n=%d %s (%d classes) to %s", n, tuple(shape), len(records), path)
        return path

    def load_cell(self, n: int, shape: Sequence[int]) -> Optional[List[ClassRecord]]:
        data = json_util.load(self._cell_path(n, shape))
        if data is None:
            return None
        return [ClassRecord.from_dict(n, EquivalenceAction.CONJUGATION, d, shape) for d in data["classes"]]

    def save_extension(self, report: ExtensionReport) -> Path:
        data = {"convention": CONVENTION, "n": report.n, "shape": list(report.shape),
                "classes": [r.to_dict() for r in report.records],
                "unresolved_pairs": [list(p) for p in report.unresolved_pairs]}
        path = json_util.dump(data, self._extension_path(report.n, report.shape))
        logger.info("Saved extension n=%d %s to %s", report.n, report.shape, path)
        return path

    def load_extension(self, n: int, shape: Sequence[int]) -> Optional[ExtensionReport]:
        data = json_util.load(self._extension_path(n, shape))
        if data is None:
            return None
        records = [ClassRecord.from_dict(n, EquivalenceAction.CONJUGATION, d, shape) for d in data["classes"]]
        return ExtensionReport(n, tuple(shape), records, [tuple(p) for p in data["unresolved_pairs"]])
#endregion


#region Tables
@dataclass
class TableArtifact:
    title: str
    header: List[str]
    rows: List[List[str]]
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {"convention": CONVENTION, "title": self.title, "header": self.header,
                "rows": self.rows, "notes": self.notes}

    def to_json(self) -> str:
        return json_util.dumps(self.to_dict())

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.header)
        writer.writerows(self.rows)
        return buf.getvalue()

    def to_markdown(self) -> str:
        lines = [f"# {self.title}", f"# {CONVENTION}", "",
                 "| " + " | ".join(self.header) + " |",
                 "|" + "|".join("---" for _ in self.header) + "|"]
        lines += ["| " + " | ".join(row) + " |" for row in self.rows]
        if self.notes:
            lines += [""] + self.notes
        return "\n".join(lines) + "\n"

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return self.to_json()
        if fmt == "csv":
            return self.to_csv()
        if fmt == "md":
            return self.to_markdown()
        raise ValueError(f"unknown format {fmt!r}")


def cell_text(records: Optional[Sequence[ClassRecord]]) -> str:
    if not records:
        return "0"
    return f"{sum(1 for r in records if r.in_ch)}/{len(records)}"


def census_table(db: ClassDatabase, qubits: Sequence[int] = (1, 2, 3)) -> TableArtifact:
    rows = []
    for n in qubits:
        records = db.load_census(n)
        if records is None:
            raise MissingDatabaseError(f"the {n}-qubit census", f"cliffhier classify-perms --qubits {n}")
        rows.append([str(n), str(len(records)), str(sum(1 for r in records if r.in_ch))])
    return TableArtifact("Affine equivalence classes of permutations", ["n", "classes", "in CH"], rows)


def cycle_table(db: ClassDatabase) -> TableArtifact:
    """In-CH over total class counts per cycle type; the last row comes from the extension."""
    header = ["n"] + [label for label, _ in CYCLE_TABLE_SHAPES]
    rows, notes = [], []
    for n in DIRECT_ROWS:
        row = [str(n)]
        for label, shape in CYCLE_TABLE_SHAPES:
            if not shape:
                row.append("1/1")
                continue
            if sum(shape) > 1 << n:
                row.append("0")
                continue
            records = db.load_cell(n, shape)
            if records is None:
                raise MissingDatabaseError(f"cell n={n} {label}",
                                           f"cliffhier classify-cycles --shape all --qubits {n}")
            row.append(cell_text(records))
        rows.append(row)

    row = [f"≥{EXTENDED_ROW}"]
    for label, shape in CYCLE_TABLE_SHAPES:
        if not shape:
            row.append("1/1")
            continue
        report = db.load_extension(EXTENDED_ROW, shape)
        if report is None:
            raise MissingDatabaseError(f"extended cell {label}",
                                       f"cliffhier classify-cycles --shape all --qubits {EXTENDED_ROW - 1} "
                                       f"--extend-to {EXTENDED_ROW}")
        text = cell_text(report.records)
        if not report.resolved:
            text += "*"
            notes.append(f"* {label}: {len(report.unresolved_pairs)} pair(s) left unresolved")
        row.append(text)
    rows.append(row)
    return TableArtifact("Affine equivalence classes of cycle structures (in CH / total)", header, rows, notes)


def emit_table(which: int, fmt: str, db: Optional[ClassDatabase] = None) -> str:
    db = db or ClassDatabase()
    if which == 2:
        table = census_table(db)
    elif which == 3:
        table = cycle_table(db)
    else:
        raise ValueError(f"no table {which}")
    return table.render(fmt)
#endregion
