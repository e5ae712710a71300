"""
Exception hierarchy shared by every gaitwalk module.

Each error carries a human-readable message, a context dictionary (subject,
manifest entry, file path...) and the process exit status the CLI maps it to.
"""

from typing import Any, Dict, Optional


class GaitwalkError(Exception):
    """Base error for all recognised failure modes."""

    exit_code: int = 2

    def __init__(self, message: str, context: Optional[Dict[str, Any]] = None):
        self.message = message
        self.context: Dict[str, Any] = dict(context or {})
        super().__init__(self.message)

    def with_context(self, **context: Any) -> "GaitwalkError":
        """Attach extra context (keeps values already present) and return self."""
        for key, value in context.items():
            self.context.setdefault(key, value)
        return self

    def __str__(self) -> str:
        if not self.context:
            return self.message
        details = ", ".join(f"{k}={v}" for k, v in self.context.items())
        return f"{self.message} ({details})"


class ConfigError(GaitwalkError):
    """Invalid or unsupported configuration document."""


# Audio input

class AudioError(GaitwalkError):
    """Problem reading a recording."""


class MissingFile(AudioError):
    pass


class UnsupportedEncoding(AudioError):
    pass


class CorruptHeader(AudioError):
    pass


# Feature extraction

class FeatureError(GaitwalkError):
    """Problem turning a signal into feature vectors."""


class SampleRateMismatch(FeatureError):
    pass


class SignalTooShort(FeatureError):
    pass


class DimensionMismatch(FeatureError):
    pass


class DegenerateCovariance(FeatureError):
    pass


# HMM training / decoding

class HmmError(GaitwalkError):
    """Problem training or decoding a model."""


class TooFewFrames(HmmError):
    pass


class NoValidPath(HmmError):
    pass


class TopologyError(HmmError):
    pass


class NumericalUnderflow(HmmError):
    """Log-domain invariant violated; always a bug, never bad input."""

    exit_code = 3


# Recognition

class RecognitionError(GaitwalkError):
    pass


class EmptyModelSet(RecognitionError):
    pass


class AllPathsInvalid(RecognitionError):
    pass


class ModelStoreError(GaitwalkError):
    """Model directory or model document cannot be read."""


# Datasets and evaluation

class DatasetError(GaitwalkError):
    pass


class SchemaError(DatasetError):
    """Manifest row rejected; `line` is the 1-based line in the CSV file."""

    def __init__(
        self,
        message: str,
        line: Optional[int] = None,
        field: Optional[str] = None,
        context: Optional[Dict[str, Any]] = None,
    ):
        self.line = line
        self.field = field
        ctx = dict(context or {})
        if line is not None:
            ctx["line"] = line
        if field is not None:
            ctx["field"] = field
        super().__init__(message, ctx)


class MissingStepCount(SchemaError):
    pass


class MismatchedRecordingSets(DatasetError):
    pass


class InsufficientData(DatasetError):
    pass


class CorpusWriteError(GaitwalkError):
    """Synthetic corpus could not be written (IoError)."""
