"""
Shared builders for the test-suite: random models, WAV bytes, onset oracle.
"""

import io
from typing import List, Optional

import numpy as np
from scipy.io import wavfile

from gaitwalk.features.sequence import FeatureSequence
from gaitwalk.hmm.model import GaussianHmm, allowed_transitions
from gaitwalk.models.reports import RecordingOutcome


def random_model(
    rng: np.random.Generator,
    num_states: int,
    dim: int,
    cyclic: bool,
    subject_id: str = "m",
) -> GaussianHmm:
    """Chain model with random stay/advance split and random Gaussians."""
    probs = np.zeros((num_states, num_states))
    for state in range(num_states):
        successor = (state + 1) % num_states
        stay = rng.uniform(0.1, 0.9)
        if state == num_states - 1 and not cyclic:
            probs[state, state] = 1.0
        else:
            probs[state, state] = stay
            probs[state, successor] = 1.0 - stay
    with np.errstate(divide="ignore"):
        log_trans = np.where(allowed_transitions(num_states, cyclic), np.log(probs), -np.inf)
    return GaussianHmm(
        subject_id=subject_id,
        log_transitions=log_trans,
        means=rng.normal(0.0, 2.0, (num_states, dim)),
        variances=rng.uniform(0.5, 2.0, (num_states, dim)),
        variance_floor=np.full(dim, 1e-6),
        cyclic=cyclic,
    )


def sequence(frames: np.ndarray, frame_shift: float = 0.01) -> FeatureSequence:
    frames = np.asarray(frames, dtype=np.float64)
    if frames.ndim == 1:
        frames = frames[:, None]
    return FeatureSequence(frames=frames, frame_shift=frame_shift)


def wav_bytes(data: np.ndarray, sample_rate: int = 16000) -> bytes:
    buffer = io.BytesIO()
    wavfile.write(buffer, sample_rate, data)
    return buffer.getvalue()


def detect_onsets(
    samples: np.ndarray,
    sample_rate: int,
    frame: float = 0.010,
    drop_db: float = 10.0,
    min_gap: float = 0.2,
) -> List[float]:
    """Onset times where the frame energy rises above (peak - drop_db)."""
    hop = int(round(frame * sample_rate))
    count = len(samples) // hop
    energy = (samples[: count * hop].reshape(count, hop) ** 2).mean(axis=1)
    level = 10.0 * np.log10(np.maximum(energy, 1e-20))
    above = level >= level.max() - drop_db
    onsets: List[float] = []
    previous: Optional[bool] = False
    for index, flag in enumerate(above):
        if flag and not previous:
            time = index * frame
            if not onsets or time - onsets[-1] >= min_gap:
                onsets.append(time)
        previous = flag
    return onsets


def outcome(subject: str, condition: str, take: int, correct: bool, steps: int = 5, true_steps=5):
    return RecordingOutcome(
        subject_id=subject,
        condition=condition,
        take=take,
        path=f"audio/{subject}_{condition}{take}.wav",
        predicted=subject if correct else "someone-else",
        correct=correct,
        log_likelihood=-100.0,
        detected_steps=steps,
        true_steps=true_steps,
    )
