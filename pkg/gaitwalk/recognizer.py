"""
Closed-set identification: one HMM per enrolled subject, every test
recording scored against all of them.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .audio.io import MonoSignal
from .core.config import HmmConfig, MfccConfig
from .core.errors import (
    AllPathsInvalid,
    DimensionMismatch,
    EmptyModelSet,
    GaitwalkError,
    ModelStoreError,
    NoValidPath,
)
from .core.parallel import parallel_map
from .features.pca import PcaTransform
from .features.pipeline import extract_features
from .features.sequence import FeatureSequence
from .hmm.decoding import viterbi
from .hmm.model import DecodeGrammar, DecodeResult, GaussianHmm
from .hmm.training import train
from .models.documents import HmmDocument, ModelSetManifest

logger = logging.getLogger(__name__)

MANIFEST_FILE = "manifest.json"
# Model files live one level down so no subject id can shadow the manifest.
MODELS_DIR = "models"


@dataclass
class SubjectModelSet:
    """Enrolled subjects plus the front-end and PCA they were trained with."""

    models: Dict[str, GaussianHmm]
    feature_config: MfccConfig
    hmm_config: HmmConfig
    pca: Optional[PcaTransform] = None

    def __post_init__(self) -> None:
        shapes = {(m.num_states, m.dim, m.cyclic) for m in self.models.values()}
        if len(shapes) > 1:
            raise DimensionMismatch(f"models disagree on states/dim/topology: {sorted(shapes)}")
        if self.pca is not None and shapes:
            dim = next(iter(shapes))[1]
            expected = (
                self.feature_config.num_cepstra
                if self.feature_config.pca_before_dynamics
                else dim
            )
            if self.pca.dim != expected:
                raise DimensionMismatch(f"PCA is {self.pca.dim}-dim, features need {expected}")

    @property
    def subject_ids(self) -> List[str]:
        return sorted(self.models)

    def features(self, signal: MonoSignal) -> FeatureSequence:
        return extract_features(signal, self.feature_config, self.pca)

    def save(self, directory: Path) -> Path:
        """Write manifest.json plus models/<subject>.json per model."""
        directory = Path(directory)
        (directory / MODELS_DIR).mkdir(parents=True, exist_ok=True)
        files = []
        for subject_id in self.subject_ids:
            name = f"{MODELS_DIR}/{subject_id}.json"
            doc = self.models[subject_id].to_document()
            (directory / name).write_text(doc.model_dump_json(indent=2) + "\n", encoding="utf-8")
            files.append(name)
        manifest = ModelSetManifest(
            subjects=self.subject_ids,
            feature_config=self.feature_config,
            hmm_config=self.hmm_config,
            pca=self.pca.to_document() if self.pca is not None else None,
            model_files=files,
        )
        path = directory / MANIFEST_FILE
        path.write_text(manifest.model_dump_json(indent=2) + "\n", encoding="utf-8")
        logger.info(f"Saved {len(files)} subject models to {directory}")
        return path

    @classmethod
    def load(cls, directory: Path) -> "SubjectModelSet":
        directory = Path(directory)
        manifest_path = directory / MANIFEST_FILE
        if not manifest_path.is_file():
            raise ModelStoreError(f"no {MANIFEST_FILE} in {directory}", {"path": str(directory)})
        try:
            manifest = ModelSetManifest.model_validate_json(manifest_path.read_text(encoding="utf-8"))
            models = {}
            for subject_id, name in zip(manifest.subjects, manifest.model_files):
                doc = HmmDocument.model_validate_json((directory / name).read_text(encoding="utf-8"))
                if doc.subject_id != subject_id:
                    raise ModelStoreError(
                        f"{name} holds subject {doc.subject_id!r}, manifest says {subject_id!r}"
                    )
                models[subject_id] = GaussianHmm.from_document(doc)
        except (OSError, ValueError) as e:
            raise ModelStoreError(f"cannot read model set: {e}", {"path": str(directory)}) from e
        pca = PcaTransform.from_document(manifest.pca) if manifest.pca is not None else None
        return cls(
            models=models,
            feature_config=manifest.feature_config,
            hmm_config=manifest.hmm_config,
            pca=pca,
        )


@dataclass(frozen=True)
class IdentificationResult:
    """Subjects ranked by decode score; `decode` belongs to the winner."""

    ranked: List[Tuple[str, float]]
    predicted: str
    decode: DecodeResult
    frame_shift: float = field(default=0.010)

    @property
    def step_boundary_seconds(self) -> List[float]:
        return [t * self.frame_shift for t in self.decode.step_boundaries]


def training_step_counts(step_counts: Sequence[int], hmm_config: HmmConfig) -> List[int]:
    """A linear model explains a whole recording with one pass."""
    if hmm_config.cyclic:
        return list(step_counts)
    return [1] * len(step_counts)


def enroll(
    recordings: Sequence[Tuple[MonoSignal, int]],
    subject_id: str,
    feature_config: MfccConfig,
    hmm_config: HmmConfig,
    pca: Optional[PcaTransform] = None,
) -> GaussianHmm:
    """
    Train one subject model from its enrollment recordings.

    Args:
        recordings: (signal, known step count) pairs
        subject_id: identifier stored in the model
        feature_config: front-end parameters
        hmm_config: topology and training schedule
        pca: enrollment rotation shared by all subjects, if any

    Returns:
        Trained model; its training_history starts with the flat-start likelihood
    """
    if not recordings:
        raise EmptyModelSet("enrollment needs at least one recording", {"subject_id": subject_id})
    try:
        sequences = [extract_features(signal, feature_config, pca) for signal, _ in recordings]
        counts = training_step_counts([k for _, k in recordings], hmm_config)
        model = train(sequences, counts, hmm_config, subject_id)
    except GaitwalkError as e:
        raise e.with_context(subject_id=subject_id)
    history = model.training_history
    logger.info(
        f"Enrolled {subject_id}: {len(recordings)} recording(s), "
        f"log-likelihood {history[0]:.2f} -> {history[-1]:.2f}"
    )
    return model


def _score(model: GaussianHmm, seq: FeatureSequence, grammar: DecodeGrammar) -> Optional[DecodeResult]:
    try:
        return viterbi(model, seq, grammar)
    except NoValidPath:
        logger.debug(f"No valid {grammar.value} path for {model.subject_id}")
        return None


def identify_features(
    model_set: SubjectModelSet,
    seq: FeatureSequence,
    grammar: DecodeGrammar,
    jobs: int = 1,
) -> IdentificationResult:
    """Score precomputed features against every model."""
    if not model_set.models:
        raise EmptyModelSet("model set holds no subjects")

    subject_ids = model_set.subject_ids
    decodes = parallel_map(
        lambda sid: _score(model_set.models[sid], seq, grammar), subject_ids, jobs
    )
    scored = [
        (sid, d.log_likelihood if d is not None else -np.inf)
        for sid, d in zip(subject_ids, decodes)
    ]
    ranked = sorted(scored, key=lambda item: (-item[1], item[0]))
    predicted, best = ranked[0]
    if not np.isfinite(best):
        raise AllPathsInvalid(
            f"no subject model admits a {grammar.value} path for {seq.num_frames} frames",
            {"frames": seq.num_frames},
        )
    winner = decodes[subject_ids.index(predicted)]
    assert winner is not None
    return IdentificationResult(
        ranked=[(sid, float(score)) for sid, score in ranked],
        predicted=predicted,
        decode=winner,
        frame_shift=seq.frame_shift,
    )


def identify(
    model_set: SubjectModelSet,
    recording: MonoSignal,
    grammar: DecodeGrammar,
    jobs: int = 1,
) -> IdentificationResult:
    """Rank all enrolled subjects for one recording (ties: ascending subject id)."""
    if not model_set.models:
        raise EmptyModelSet("model set holds no subjects")
    return identify_features(model_set, model_set.features(recording), grammar, jobs)


def detected_steps(result: IdentificationResult) -> int:
    """Steps found by the winning model's decode."""
    return result.decode.step_count
