"""
Report files: JSON documents and the N / B / S / average text table.
"""

from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from pydantic import ValidationError

from ..core.errors import DatasetError
from ..models.reports import CONDITIONS, EvaluationReport

TABLE_COLUMNS = [*CONDITIONS, "average"]


def percent(value: Optional[float]) -> str:
    return "-" if value is None else f"{100.0 * value:.1f}"


def table_rows(rows: Sequence[Tuple[str, EvaluationReport]]) -> List[List[str]]:
    """Cells (label, N, B, S, average) in percent with one decimal."""
    cells = []
    for label, report in rows:
        accuracy = report.per_condition_accuracy
        cells.append(
            [label]
            + [percent(accuracy.get(c)) for c in CONDITIONS]
            + [percent(report.average)]
        )
    return cells


def format_table(rows: Sequence[Tuple[str, EvaluationReport]], title: str = "system") -> str:
    """
    Render labelled reports as an aligned plain-text table.

        system                   N      B      S  average
        basic HMM             53.3   30.7    7.0     30.3
    """
    header = [title, *TABLE_COLUMNS]
    body = table_rows(rows)
    widths = [max(len(r[i]) for r in [header, *body]) for i in range(len(header))]
    widths[1:] = [max(w, 6) for w in widths[1:]]

    def line(cells: List[str]) -> str:
        first = cells[0].ljust(widths[0])
        rest = [cell.rjust(width) for cell, width in zip(cells[1:], widths[1:])]
        return "  ".join([first, *rest]).rstrip()

    return "\n".join([line(header), *(line(r) for r in body)]) + "\n"


def write_report(report: EvaluationReport, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return path


def read_report(path: Path) -> EvaluationReport:
    """Load a report JSON; the per-condition figures are re-derived from its recordings."""
    path = Path(path)
    try:
        stored = EvaluationReport.model_validate_json(path.read_text(encoding="utf-8"))
    except (OSError, ValidationError) as e:
        raise DatasetError(f"cannot read report: {e}", {"path": str(path)}) from e
    return EvaluationReport.from_outcomes(
        stored.per_recording, split=stored.split, system=stored.system
    )
