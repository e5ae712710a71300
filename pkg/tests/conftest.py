"""
Test fixtures: generated corpora and the small configuration that keeps
end-to-end runs quick.
"""

from pathlib import Path

import numpy as np
import pytest

from gaitwalk.core.config import HmmConfig, MfccConfig, SynthConfig
from gaitwalk.evaluation.manifest import Manifest
from gaitwalk.synth.corpus import MANIFEST_NAME, generate_corpus

SMALL_CORPUS = SynthConfig(
    num_subjects=3,
    takes_n=3,
    takes_b=1,
    takes_s=1,
    enrollment_takes=2,
    steps_per_recording=3,
    seed=7,
)
SMALL_HMM = HmmConfig(num_states=5, training_iterations=2)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def mfcc_config() -> MfccConfig:
    return MfccConfig()


@pytest.fixture(scope="session")
def small_hmm() -> HmmConfig:
    return SMALL_HMM


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory: pytest.TempPathFactory) -> Manifest:
    """3 subjects x (2 enrollment + 1 N + 1 B + 1 S) short recordings."""
    return generate_corpus(SMALL_CORPUS, tmp_path_factory.mktemp("small_corpus"))


@pytest.fixture(scope="session")
def small_manifest_path(small_corpus: Manifest) -> Path:
    return small_corpus.entries[0].path.parents[2] / MANIFEST_NAME


@pytest.fixture(scope="session")
def full_corpus(tmp_path_factory: pytest.TempPathFactory) -> Manifest:
    """Default 10-subject corpus, seed 42, SNR 10 dB."""
    return generate_corpus(SynthConfig(), tmp_path_factory.mktemp("full_corpus"))
