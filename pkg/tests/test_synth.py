"""
Synthetic corpus generator tests.
"""

import itertools

import numpy as np
import pytest

from gaitwalk.audio.io import load_mono
from gaitwalk.core.config import SynthConfig
from gaitwalk.core.errors import CorpusWriteError
from gaitwalk.evaluation.manifest import Role, load_manifest
from gaitwalk.synth.corpus import (
    MANIFEST_NAME,
    generate_corpus,
    recording_plan,
    subject_profile,
    synthesize_recording,
)

from helpers import detect_onsets

TINY = SynthConfig(
    num_subjects=2, takes_n=2, takes_b=1, takes_s=1, enrollment_takes=1, steps_per_recording=3, seed=5
)


def test_default_corpus_shape():
    plan = recording_plan(SynthConfig())
    assert len(plan) == 100
    assert sum(role is Role.ENROLLMENT for *_, role in plan) == 40
    assert {cond for _, cond, take, role in plan if role is Role.ENROLLMENT} == {"N"}


def test_same_seed_gives_identical_files(tmp_path):
    first = generate_corpus(TINY, tmp_path / "a")
    generate_corpus(TINY, tmp_path / "b")
    for entry in first.entries:
        relative = entry.path.relative_to(tmp_path / "a")
        assert entry.path.read_bytes() == (tmp_path / "b" / relative).read_bytes()
    assert (tmp_path / "a" / MANIFEST_NAME).read_bytes() == (tmp_path / "b" / MANIFEST_NAME).read_bytes()


def test_parallel_generation_matches_serial(tmp_path):
    serial = generate_corpus(TINY, tmp_path / "serial")
    generate_corpus(TINY, tmp_path / "threads", jobs=4)
    for entry in serial.entries:
        relative = entry.path.relative_to(tmp_path / "serial")
        assert entry.path.read_bytes() == (tmp_path / "threads" / relative).read_bytes()


def test_different_seed_changes_audio():
    profile = subject_profile(1, "subject001", TINY)
    a = synthesize_recording(profile, "N", 1, TINY)
    b = synthesize_recording(profile, "N", 1, TINY.model_copy(update={"seed": 6}))
    assert not np.array_equal(a.samples, b.samples)


def test_manifest_validates(small_corpus, small_manifest_path):
    manifest = load_manifest(small_manifest_path)
    assert len(manifest.entries) == len(small_corpus.entries) == 15
    assert manifest.role_counts() == {"enrollment": 6, "identification": 9}
    assert all(e.step_count == 3 for e in manifest.entries)
    assert all(e.path.is_file() for e in manifest.entries)


def test_step_onsets_recoverable_from_energy(small_corpus):
    normal = [e for e in small_corpus.entries if e.condition == "N"]
    for entry in normal:
        signal = load_mono(entry.path)
        onsets = detect_onsets(signal.samples, signal.sample_rate)
        assert len(onsets) == entry.step_count, entry.path


def test_no_clipping(small_corpus):
    for entry in small_corpus.entries:
        signal = load_mono(entry.path)
        assert np.max(np.abs(signal.samples)) <= 1.0


def test_subject_templates_differ():
    config = SynthConfig()
    profiles = [subject_profile(42, f"subject{i:03d}", config) for i in range(1, 11)]
    for a, b in itertools.combinations(profiles, 2):
        assert np.linalg.norm(a.step_spectrum - b.step_spectrum) > 0
    periods = [p.base_period for p in profiles]
    assert min(periods) >= 0.45 and max(periods) <= 0.65


def test_profile_is_a_function_of_seed_and_id():
    a = subject_profile(42, "subject001", SynthConfig())
    b = subject_profile(42, "subject001", SynthConfig(num_subjects=3))
    np.testing.assert_array_equal(a.step_spectrum, b.step_spectrum)
    assert a.base_period == b.base_period


def test_unwritable_destination(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("not a directory")
    with pytest.raises(CorpusWriteError):
        generate_corpus(TINY, blocker)
