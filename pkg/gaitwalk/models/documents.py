"""
Versioned JSON documents for features, PCA transforms, HMMs and model sets.
"""

from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..core.config import HmmConfig, MfccConfig


class FeatureDocument(BaseModel):
    """{"version":1, "dim":D, "frame_shift":..., "frames":[[...]]}"""

    model_config = ConfigDict(extra="forbid")

    version: Literal[1] = 1
    dim: int = Field(ge=1)
    frame_shift: float = Field(gt=0)
    frames: List[List[float]]

    @model_validator(mode="after")
    def check_shape(self) -> "FeatureDocument":
        if not self.frames:
            raise ValueError("frames must not be empty")
        if any(len(row) != self.dim for row in self.frames):
            raise ValueError("every frame must have `dim` values")
        return self


class PcaDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    version: Literal[1] = 1
    dim: int = Field(ge=1)
    mean: List[float]
    rotation: List[List[float]]
    eigenvalues: List[float]

    @model_validator(mode="after")
    def check_shape(self) -> "PcaDocument":
        if len(self.mean) != self.dim or len(self.eigenvalues) != self.dim:
            raise ValueError("mean and eigenvalues must have `dim` entries")
        if len(self.rotation) != self.dim or any(len(r) != self.dim for r in self.rotation):
            raise ValueError("rotation must be dim x dim")
        return self


class HmmDocument(BaseModel):
    """
    One subject model. Transition log-probabilities are stored row-major with
    `null` for transitions the topology forbids.
    """

    model_config = ConfigDict(extra="forbid")

    version: Literal[1] = 1
    subject_id: str
    states: int = Field(ge=2)
    dim: int = Field(ge=1)
    cyclic: bool
    log_transitions: List[List[Optional[float]]]
    means: List[List[float]]
    variances: List[List[float]]
    variance_floor: List[float]
    training_history: List[float] = []

    @model_validator(mode="after")
    def check_shape(self) -> "HmmDocument":
        if len(self.log_transitions) != self.states or any(
            len(r) != self.states for r in self.log_transitions
        ):
            raise ValueError("log_transitions must be states x states")
        for name in ("means", "variances"):
            rows = getattr(self, name)
            if len(rows) != self.states or any(len(r) != self.dim for r in rows):
                raise ValueError(f"{name} must be states x dim")
        if len(self.variance_floor) != self.dim:
            raise ValueError("variance_floor must have `dim` entries")
        return self


class ModelSetManifest(BaseModel):
    """manifest.json of a model directory."""

    model_config = ConfigDict(extra="forbid")

    version: Literal[1] = 1
    subjects: List[str]
    feature_config: MfccConfig
    hmm_config: HmmConfig
    pca: Optional[PcaDocument] = None
    model_files: List[str]

    @model_validator(mode="after")
    def check_files(self) -> "ModelSetManifest":
        if len(self.model_files) != len(self.subjects):
            raise ValueError("one model file per subject is required")
        if len(set(self.subjects)) != len(self.subjects):
            raise ValueError("duplicate subject ids")
        return self
