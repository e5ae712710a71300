"""
Frame-feature container shared by the front-end, PCA and the HMMs.
"""

from dataclasses import dataclass

import numpy as np

from ..core.errors import FeatureError
from ..models.documents import FeatureDocument


@dataclass(frozen=True)
class FeatureSequence:
    """T x D matrix of frame vectors plus the frame shift in seconds."""

    frames: np.ndarray
    frame_shift: float

    def __post_init__(self) -> None:
        if self.frames.ndim != 2 or self.frames.shape[0] < 1:
            raise FeatureError("feature sequence needs at least one frame")
        if not np.all(np.isfinite(self.frames)):
            raise FeatureError("feature sequence contains non-finite values")

    @property
    def num_frames(self) -> int:
        return int(self.frames.shape[0])

    @property
    def dim(self) -> int:
        return int(self.frames.shape[1])

    def frame_time(self, index: int) -> float:
        """Start time in seconds of frame `index`."""
        return index * self.frame_shift

    def to_document(self) -> FeatureDocument:
        return FeatureDocument(
            dim=self.dim,
            frame_shift=self.frame_shift,
            frames=self.frames.tolist(),
        )

    @classmethod
    def from_document(cls, doc: FeatureDocument) -> "FeatureSequence":
        frames = np.asarray(doc.frames, dtype=np.float64).reshape(-1, doc.dim)
        return cls(frames=frames, frame_shift=doc.frame_shift)
