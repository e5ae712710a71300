"""
Experiment manifests: which recording plays which role for which subject.

CSV header: subject_id,condition,take,role,path,step_count
Paths are resolved relative to the manifest file.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Dict, Iterable, List, Literal, Optional, Tuple

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from ..core.errors import MissingStepCount, SchemaError

logger = logging.getLogger(__name__)

MANIFEST_COLUMNS = ["subject_id", "condition", "take", "role", "path", "step_count"]
CONDITIONS = ("N", "B", "S")


class Role(str, Enum):
    ENROLLMENT = "enrollment"
    IDENTIFICATION = "identification"


class ManifestEntry(BaseModel):
    """One recording row."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    subject_id: str = Field(min_length=1)
    condition: Literal["N", "B", "S"]  # normal, backpack, shoe covers
    take: int = Field(ge=1)
    role: Role
    path: Path
    step_count: Optional[int] = Field(default=None, ge=1)

    @field_validator("subject_id")
    @classmethod
    def strip_id(cls, v: str) -> str:
        v = v.strip()
        if not v or "/" in v or "\\" in v:
            raise ValueError("subject_id must be a non-empty name without path separators")
        return v

    @property
    def key(self) -> Tuple[str, str, int]:
        return (self.subject_id, self.condition, self.take)


@dataclass(frozen=True)
class Manifest:
    entries: List[ManifestEntry]
    split: Literal["development", "test"] = "development"

    def by_role(self, role: Role) -> List[ManifestEntry]:
        return [e for e in self.entries if e.role is role]

    @property
    def enrollment(self) -> List[ManifestEntry]:
        return self.by_role(Role.ENROLLMENT)

    @property
    def identification(self) -> List[ManifestEntry]:
        return self.by_role(Role.IDENTIFICATION)

    @property
    def enrolled_subjects(self) -> List[str]:
        return sorted({e.subject_id for e in self.enrollment})

    def role_counts(self) -> Dict[str, int]:
        counts = {role.value: 0 for role in Role}
        for entry in self.entries:
            counts[entry.role.value] += 1
        return counts


def _row_error(exc: ValidationError, line: int) -> SchemaError:
    first = exc.errors()[0]
    field = ".".join(str(p) for p in first.get("loc", ())) or None
    return SchemaError(f"line {line}: {first.get('msg', 'invalid value')}", line=line, field=field)


def validate_entries(entries: Iterable[Tuple[int, ManifestEntry]]) -> List[ManifestEntry]:
    """Protocol rules: enrollment is N-only with known steps; keys are unique."""
    seen: Dict[Tuple[str, str, int], int] = {}
    valid = []
    for line, entry in entries:
        if entry.role is Role.ENROLLMENT:
            if entry.condition != "N":
                raise SchemaError(
                    f"line {line}: enrollment rows must use condition N, got {entry.condition}",
                    line=line,
                    field="condition",
                )
            if entry.step_count is None:
                raise MissingStepCount(
                    f"line {line}: enrollment row for {entry.subject_id} has no step_count",
                    line=line,
                    field="step_count",
                )
        if entry.key in seen:
            raise SchemaError(
                f"line {line}: duplicate (subject, condition, take) {entry.key}, "
                f"first seen on line {seen[entry.key]}",
                line=line,
                field="take",
            )
        seen[entry.key] = line
        valid.append(entry)
    return valid


def load_manifest(
    path: Path, split: Literal["development", "test"] = "development"
) -> Manifest:
    """
    Read and validate a manifest CSV.

    Args:
        path: manifest file; recording paths inside are relative to its folder
        split: which protocol split the manifest describes

    Returns:
        Validated Manifest
    """
    path = Path(path)
    if not path.is_file():
        raise SchemaError(f"manifest not found: {path}", context={"path": str(path)})
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise SchemaError(f"manifest is not valid CSV: {e}", line=1) from e

    missing = [c for c in MANIFEST_COLUMNS if c not in frame.columns]
    extra = [c for c in frame.columns if c not in MANIFEST_COLUMNS]
    if missing or extra:
        raise SchemaError(
            f"manifest header must be {','.join(MANIFEST_COLUMNS)} "
            f"(missing {missing}, unexpected {extra})",
            line=1,
        )

    base = path.parent
    rows = []
    for offset, record in enumerate(frame.to_dict(orient="records")):
        line = offset + 2
        record = {k: (v.strip() if isinstance(v, str) else v) for k, v in record.items()}
        if record["step_count"] == "":
            record["step_count"] = None
        try:
            entry = ManifestEntry(**record)
        except ValidationError as e:
            raise _row_error(e, line) from e
        if not entry.path.is_absolute():
            entry = entry.model_copy(update={"path": (base / entry.path)})
        rows.append((line, entry))

    entries = validate_entries(rows)
    manifest = Manifest(entries=entries, split=split)
    logger.info(f"Loaded manifest {path}: {manifest.role_counts()}")
    return manifest


def write_manifest(manifest: Manifest, path: Path) -> Path:
    """Write entries as CSV with paths relative to the manifest folder when possible."""
    path = Path(path)
    base = path.parent.resolve()
    rows = []
    for entry in manifest.entries:
        entry_path = entry.path
        try:
            entry_path = entry.path.resolve().relative_to(base)
        except ValueError:
            pass
        rows.append(
            {
                "subject_id": entry.subject_id,
                "condition": entry.condition,
                "take": str(entry.take),
                "role": entry.role.value,
                "path": entry_path.as_posix(),
                "step_count": "" if entry.step_count is None else str(entry.step_count),
            }
        )
    frame = pd.DataFrame(rows, columns=MANIFEST_COLUMNS)
    frame.to_csv(path, index=False, lineterminator="\n", encoding="utf-8")
    return path
