"""
Enrollment / identification protocol on a small generated corpus.
"""

import pytest

from gaitwalk.core.config import MfccConfig, Settings
from gaitwalk.core.errors import DatasetError
from gaitwalk.evaluation.manifest import Manifest
from gaitwalk.evaluation.protocol import (
    ABLATION_LADDER,
    enroll_subjects,
    evaluate,
    run_ablation,
    run_protocol,
)
from gaitwalk.hmm.model import DecodeGrammar

FEATURES = MfccConfig()


@pytest.fixture(scope="module")
def enrolled(small_corpus, small_hmm):
    return enroll_subjects(small_corpus, FEATURES, small_hmm, use_pca=True)


def test_enrollment_trains_every_subject(enrolled, small_corpus):
    assert enrolled.subject_ids == small_corpus.enrolled_subjects
    assert enrolled.pca is not None and enrolled.pca.dim == 39
    for model in enrolled.models.values():
        assert model.num_states == 5
        assert len(model.training_history) == 3


def test_accuracy_matches_recount(enrolled, small_corpus):
    report = evaluate(enrolled, small_corpus, DecodeGrammar.MULTI_STEP)
    assert len(report.per_recording) == len(small_corpus.identification)
    for condition in ("N", "B", "S"):
        rows = [o for o in report.per_recording if o.condition == condition]
        assert report.counts[condition] == len(rows) == 3
        assert report.per_condition_accuracy[condition] == sum(o.correct for o in rows) / 3
    assert report.system.grammar == "multi"
    assert report.system.topology == "cyclic"


def test_grammar_changes_only_scores(enrolled, small_corpus):
    multi = evaluate(enrolled, small_corpus, DecodeGrammar.MULTI_STEP)
    single = evaluate(enrolled, small_corpus, DecodeGrammar.SINGLE_PASS)
    assert [o.key for o in multi.per_recording] == [o.key for o in single.per_recording]
    assert multi.counts == single.counts
    assert all(o.detected_steps == 1 for o in single.per_recording)


def test_parallel_evaluation_is_identical(enrolled, small_corpus):
    serial = evaluate(enrolled, small_corpus, DecodeGrammar.MULTI_STEP)
    threaded = evaluate(enrolled, small_corpus, DecodeGrammar.MULTI_STEP, jobs=4)
    assert serial.model_dump_json() == threaded.model_dump_json()


def test_closed_set_is_required(enrolled, small_corpus):
    stranger = small_corpus.identification[0].model_copy(update={"subject_id": "nobody"})
    manifest = Manifest(entries=[*small_corpus.enrollment, stranger])
    with pytest.raises(DatasetError, match="closed set"):
        evaluate(enrolled, manifest, DecodeGrammar.MULTI_STEP)


def test_run_protocol_without_pca(small_corpus, small_hmm):
    report = run_protocol(
        small_corpus, FEATURES, small_hmm.model_copy(update={"cyclic": False}),
        DecodeGrammar.SINGLE_PASS, use_pca=False,
    )
    assert report.system.use_pca is False
    assert report.system.topology == "linear"
    assert sum(report.counts.values()) == 9


def test_ablation_ladder(small_corpus, small_hmm):
    settings = Settings(hmm=small_hmm)
    rows = run_ablation(small_corpus, settings)
    assert [row.label for row in rows] == [step.label for step in ABLATION_LADDER]
    assert rows[0].p_values is None
    for row in rows[1:]:
        assert set(row.p_values) == {"N", "B", "S", "all"}
        assert all(0.0 <= p <= 1.0 for p in row.p_values.values())
    assert rows[0].report.system.grammar == "single"
    assert rows[-1].report.system.topology == "cyclic"
