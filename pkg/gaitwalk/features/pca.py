"""
Full-rank PCA rotation fitted on enrollment features.

No whitening and no truncation: the transform only decorrelates.
"""

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..core.errors import DegenerateCovariance, DimensionMismatch
from ..models.documents import PcaDocument
from .sequence import FeatureSequence

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PcaTransform:
    """rotation rows are eigenvectors of the pooled covariance, largest first."""

    mean: np.ndarray
    rotation: np.ndarray
    eigenvalues: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.mean.shape[0])

    def to_document(self) -> PcaDocument:
        return PcaDocument(
            dim=self.dim,
            mean=self.mean.tolist(),
            rotation=self.rotation.tolist(),
            eigenvalues=self.eigenvalues.tolist(),
        )

    @classmethod
    def from_document(cls, doc: PcaDocument) -> "PcaTransform":
        return cls(
            mean=np.asarray(doc.mean, dtype=np.float64),
            rotation=np.asarray(doc.rotation, dtype=np.float64),
            eigenvalues=np.asarray(doc.eigenvalues, dtype=np.float64),
        )


def fit_pca(sequences: Sequence[FeatureSequence]) -> PcaTransform:
    """
    Eigendecomposition of the pooled sample covariance (denominator T-1).

    Each eigenvector is signed so its largest-magnitude entry is positive,
    which keeps serialized models identical between runs.
    """
    if not sequences:
        raise DegenerateCovariance("no enrollment features to fit PCA on")
    dims = {seq.dim for seq in sequences}
    if len(dims) != 1:
        raise DimensionMismatch(f"sequences disagree on dimension: {sorted(dims)}")

    pooled = np.vstack([seq.frames for seq in sequences])
    num_frames, dim = pooled.shape
    if num_frames < dim + 1:
        raise DegenerateCovariance(
            f"{num_frames} pooled frames cannot estimate a {dim}-dim covariance",
            {"frames": num_frames, "dim": dim},
        )

    mean = pooled.mean(axis=0)
    cov = np.cov(pooled, rowvar=False, ddof=1)
    eigenvalues, eigenvectors = np.linalg.eigh(cov)

    order = np.argsort(-eigenvalues, kind="stable")
    eigenvalues = np.clip(eigenvalues[order], 0.0, None)
    rotation = eigenvectors[:, order].T

    pivots = np.argmax(np.abs(rotation), axis=1)
    signs = np.sign(rotation[np.arange(dim), pivots])
    signs[signs == 0] = 1.0
    rotation = rotation * signs[:, None]

    logger.debug(
        f"Fitted PCA on {num_frames} frames; leading eigenvalues "
        f"{np.round(eigenvalues[:3], 4).tolist()}"
    )
    return PcaTransform(mean=mean, rotation=rotation, eigenvalues=eigenvalues)


def apply_pca(transform: PcaTransform, seq: FeatureSequence) -> FeatureSequence:
    """Rotate every centred frame: f -> rotation @ (f - mean)."""
    if seq.dim != transform.dim:
        raise DimensionMismatch(
            f"PCA expects {transform.dim}-dim frames, got {seq.dim}",
            {"expected": transform.dim, "got": seq.dim},
        )
    rotated = (seq.frames - transform.mean) @ transform.rotation.T
    return FeatureSequence(frames=rotated, frame_shift=seq.frame_shift)
