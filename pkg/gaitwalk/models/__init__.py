"""
JSON document models package.
"""

from .documents import FeatureDocument, HmmDocument, ModelSetManifest, PcaDocument
from .reports import EvaluationReport, RecordingOutcome, StepStatistics, SystemDescription

# Make documents available at package level
__all__ = [
    "EvaluationReport",
    "FeatureDocument",
    "HmmDocument",
    "ModelSetManifest",
    "PcaDocument",
    "RecordingOutcome",
    "StepStatistics",
    "SystemDescription",
]
