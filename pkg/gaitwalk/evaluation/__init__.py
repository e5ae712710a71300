"""Manifest-driven enrollment / identification experiments."""

from .manifest import Manifest, ManifestEntry, Role, load_manifest, write_manifest
from .protocol import (
    ABLATION_LADDER,
    AblationRow,
    enroll_subjects,
    evaluate,
    run_ablation,
    run_protocol,
)
from .report import format_table, read_report, write_report
from .significance import PairedTTest, paired_t_test, significance_test

__all__ = [
    "ABLATION_LADDER",
    "AblationRow",
    "Manifest",
    "ManifestEntry",
    "PairedTTest",
    "Role",
    "enroll_subjects",
    "evaluate",
    "format_table",
    "load_manifest",
    "paired_t_test",
    "read_report",
    "run_ablation",
    "run_protocol",
    "significance_test",
    "write_manifest",
    "write_report",
]
