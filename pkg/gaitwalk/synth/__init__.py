"""Synthetic walking-sound corpora with known identities and step counts."""

from .corpus import (
    MANIFEST_NAME,
    SubjectProfile,
    generate_corpus,
    subject_profile,
    synthesize_recording,
)

__all__ = [
    "MANIFEST_NAME",
    "SubjectProfile",
    "generate_corpus",
    "subject_profile",
    "synthesize_recording",
]
