"""
Enrollment / identification protocol over a manifest.

Models are learnt from the N enrollment rows only; the PCA rotation is fitted
on the same enrollment data and applied to every recording.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from ..audio.io import MonoSignal, load_mono
from ..core.config import HmmConfig, MfccConfig, Settings
from ..core.errors import DatasetError, GaitwalkError
from ..core.parallel import parallel_map
from ..features.pipeline import fit_enrollment_pca
from ..hmm.model import DecodeGrammar
from ..models.reports import EvaluationReport, RecordingOutcome, SystemDescription
from ..recognizer import SubjectModelSet, enroll, identify
from .manifest import Manifest, ManifestEntry
from .significance import significance_test

logger = logging.getLogger(__name__)


def _load(entry: ManifestEntry) -> MonoSignal:
    try:
        return load_mono(entry.path)
    except GaitwalkError as e:
        raise e.with_context(entry=str(entry.path), subject_id=entry.subject_id)


def enroll_subjects(
    manifest: Manifest,
    feature_config: MfccConfig,
    hmm_config: HmmConfig,
    use_pca: bool = True,
    jobs: int = 1,
) -> SubjectModelSet:
    """
    Train one model per subject from the manifest's enrollment rows.

    The PCA (when enabled) is fitted on the pooled enrollment features of
    all subjects before any model is trained.
    """
    enrollment = manifest.enrollment
    if not enrollment:
        raise DatasetError("manifest has no enrollment rows")

    signals = parallel_map(_load, enrollment, jobs)
    pca = fit_enrollment_pca(signals, feature_config) if use_pca else None

    by_subject: Dict[str, List[Tuple[MonoSignal, int]]] = {}
    for entry, signal in zip(enrollment, signals):
        assert entry.step_count is not None
        by_subject.setdefault(entry.subject_id, []).append((signal, entry.step_count))

    subject_ids = sorted(by_subject)
    models = parallel_map(
        lambda sid: enroll(by_subject[sid], sid, feature_config, hmm_config, pca),
        subject_ids,
        jobs,
    )
    logger.info(f"Enrolled {len(models)} subjects (PCA {'on' if pca is not None else 'off'})")
    return SubjectModelSet(
        models=dict(zip(subject_ids, models)),
        feature_config=feature_config,
        hmm_config=hmm_config,
        pca=pca,
    )


def describe(model_set: SubjectModelSet, grammar: DecodeGrammar) -> SystemDescription:
    return SystemDescription(
        grammar=grammar.value,
        topology="cyclic" if model_set.hmm_config.cyclic else "linear",
        use_pca=model_set.pca is not None,
        num_states=model_set.hmm_config.num_states,
        training_iterations=model_set.hmm_config.training_iterations,
    )


def evaluate(
    model_set: SubjectModelSet,
    manifest: Manifest,
    grammar: DecodeGrammar,
    jobs: int = 1,
) -> EvaluationReport:
    """Identify every identification row and aggregate per condition."""
    rows = manifest.identification
    enrolled = set(model_set.models)
    strangers = sorted({e.subject_id for e in rows} - enrolled)
    if strangers:
        raise DatasetError(
            "identification subjects without enrollment data (closed set required)",
            {"subjects": ",".join(strangers)},
        )

    def run(entry: ManifestEntry) -> RecordingOutcome:
        try:
            result = identify(model_set, _load(entry), grammar)
        except GaitwalkError as e:
            raise e.with_context(entry=str(entry.path), subject_id=entry.subject_id)
        return RecordingOutcome(
            subject_id=entry.subject_id,
            condition=entry.condition,
            take=entry.take,
            path=entry.path.as_posix(),
            predicted=result.predicted,
            correct=result.predicted == entry.subject_id,
            log_likelihood=result.ranked[0][1],
            detected_steps=result.decode.step_count,
            true_steps=entry.step_count,
        )

    outcomes = parallel_map(run, rows, jobs)
    report = EvaluationReport.from_outcomes(
        outcomes, split=manifest.split, system=describe(model_set, grammar)
    )
    accuracies = {c: v for c, v in report.per_condition_accuracy.items()}
    logger.info(f"Accuracy per condition: {accuracies}, average {report.average}")
    return report


def run_protocol(
    manifest: Manifest,
    feature_config: MfccConfig,
    hmm_config: HmmConfig,
    grammar: DecodeGrammar,
    use_pca: bool = True,
    jobs: int = 1,
) -> EvaluationReport:
    """Enroll every subject, then identify every identification recording."""
    model_set = enroll_subjects(manifest, feature_config, hmm_config, use_pca, jobs)
    return evaluate(model_set, manifest, grammar, jobs)


@dataclass(frozen=True)
class AblationStep:
    label: str
    cyclic: bool
    grammar: DecodeGrammar
    use_pca: bool


ABLATION_LADDER = (
    AblationStep("basic HMM", cyclic=False, grammar=DecodeGrammar.SINGLE_PASS, use_pca=False),
    AblationStep("+ multi-step decoding", cyclic=False, grammar=DecodeGrammar.MULTI_STEP, use_pca=False),
    AblationStep("+ PCA", cyclic=False, grammar=DecodeGrammar.MULTI_STEP, use_pca=True),
    AblationStep("+ step modelling", cyclic=True, grammar=DecodeGrammar.MULTI_STEP, use_pca=True),
)


@dataclass(frozen=True)
class AblationRow:
    label: str
    report: EvaluationReport
    p_values: Optional[Dict[str, float]] = None  # vs. the previous row; "all" pools conditions


def run_ablation(manifest: Manifest, settings: Settings) -> List[AblationRow]:
    """
    Evaluate the four system configurations from a single-pass linear
    baseline up to cyclic step modelling, each tested against its predecessor.
    """
    rows: List[AblationRow] = []
    cache: Dict[Tuple[bool, bool], SubjectModelSet] = {}
    for step in ABLATION_LADDER:
        hmm_config = settings.hmm.model_copy(update={"cyclic": step.cyclic})
        key = (step.cyclic, step.use_pca)
        if key not in cache:
            cache[key] = enroll_subjects(
                manifest, settings.features, hmm_config, step.use_pca, settings.jobs
            )
        report = evaluate(cache[key], manifest, step.grammar, settings.jobs)
        p_values = None
        if rows:
            previous = rows[-1].report
            p_values = {}
            for condition in ("N", "B", "S", None):
                subset = [o for o in report.per_recording if condition is None or o.condition == condition]
                if len(subset) >= 2:
                    p_values[condition or "all"] = significance_test(previous, report, condition)
        logger.info(f"Ablation row '{step.label}': average {report.average}")
        rows.append(AblationRow(label=step.label, report=report, p_values=p_values))
    return rows
