"""
Seeded generator of synthetic walking recordings.

Each subject owns a step spectrum, a clothing-rustle spectrum, a burst decay
and a walking period, all drawn from (seed, subject_id). A recording is a
train of spectrally shaped noise bursts at a jittered period, rustle that
swells between steps and stationary background noise at a fixed SNR.
"""

import hashlib
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy import fft

from ..audio.io import MonoSignal, write_wav
from ..core.config import SynthConfig
from ..core.errors import CorpusWriteError
from ..core.parallel import parallel_map
from ..evaluation.manifest import Manifest, ManifestEntry, Role, write_manifest

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.csv"
AUDIO_DIR = "audio"
CONDITION_INDEX = {"N": 0, "B": 1, "S": 2}

NUM_BANDS = 16
LOWEST_BAND_HZ = 100.0
HIGHEST_BAND_HZ = 7500.0
STEP_GAIN_RANGE_DB = 15.0
RUSTLE_GAIN_RANGE_DB = 10.0
DECAY_RANGE = (0.045, 0.075)
RUSTLE_LEVEL = 0.08
FIRST_ONSET = 0.05
PEAK_TARGET = 0.5
PEAK_LIMIT = 0.95

# per-take variability
TAKE_LEVEL_DB = 1.5
TAKE_SPECTRAL_DB = 1.0
TAKE_TEMPO = 0.03
STEP_LEVEL_DB = 1.0

# load (B) and shoe covers (S)
BACKPACK_PERIOD_FACTOR = 1.12
BACKPACK_FREQ_SCALE = 0.88
BACKPACK_LOW_BOOST_DB = 4.0
BACKPACK_DECAY_FACTOR = 1.2
BACKPACK_RUSTLE_FACTOR = 2.0
COVER_CUTOFF_HZ = 800.0
COVER_SLOPE_DB_PER_OCTAVE = 18.0
NORMAL_ATTACK = 0.002
COVER_ATTACK = 0.020


@dataclass(frozen=True)
class SubjectProfile:
    """Everything that makes one synthetic walker sound like themself."""

    subject_id: str
    step_spectrum: np.ndarray  # dB gain per band
    rustle_spectrum: np.ndarray  # dB gain per band
    base_period: float  # seconds between steps
    decay: float  # burst time constant, seconds


def _id_words(subject_id: str) -> List[int]:
    digest = hashlib.sha256(subject_id.encode("utf-8")).digest()
    return [int(w) for w in np.frombuffer(digest[:16], dtype="<u4")]


def _rng(seed: int, subject_id: str, *extra: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, *_id_words(subject_id), *extra]))


def band_centers(sample_rate: int) -> np.ndarray:
    top = min(HIGHEST_BAND_HZ, 0.45 * sample_rate)
    return np.geomspace(LOWEST_BAND_HZ, top, NUM_BANDS)


def subject_id_for(index: int) -> str:
    return f"subject{index:03d}"


def subject_profile(seed: int, subject_id: str, config: SynthConfig) -> SubjectProfile:
    """Deterministic in (seed, subject_id)."""
    rng = _rng(seed, subject_id)
    low, high = config.step_period_range
    return SubjectProfile(
        subject_id=subject_id,
        step_spectrum=rng.uniform(-STEP_GAIN_RANGE_DB, STEP_GAIN_RANGE_DB, NUM_BANDS),
        rustle_spectrum=rng.uniform(-RUSTLE_GAIN_RANGE_DB, RUSTLE_GAIN_RANGE_DB, NUM_BANDS),
        base_period=float(rng.uniform(low, high)),
        decay=float(rng.uniform(*DECAY_RANGE)),
    )


def _response(
    freqs: np.ndarray,
    centers: np.ndarray,
    gains_db: np.ndarray,
    freq_scale: float = 1.0,
    extra_db: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Amplitude response interpolated on log-frequency between band centres."""
    warped = np.log(np.maximum(freqs / freq_scale, 1.0))
    db = np.interp(warped, np.log(centers), gains_db)
    if extra_db is not None:
        db = db + extra_db
    return 10.0 ** (db / 20.0)


def shaped_noise(
    rng: np.random.Generator,
    n: int,
    sample_rate: int,
    gains_db: np.ndarray,
    freq_scale: float = 1.0,
    low_pass_hz: Optional[float] = None,
    low_boost_db: float = 0.0,
) -> np.ndarray:
    """Unit-RMS white noise coloured by a band gain template."""
    white = rng.standard_normal(n)
    freqs = fft.rfftfreq(n, d=1.0 / sample_rate)
    centers = band_centers(sample_rate)
    extra = np.zeros_like(freqs)
    if low_pass_hz is not None:
        octaves = np.log2(np.maximum(freqs, low_pass_hz) / low_pass_hz)
        extra -= COVER_SLOPE_DB_PER_OCTAVE * octaves
    if low_boost_db:
        extra += low_boost_db * np.clip(1.0 - np.log2(np.maximum(freqs, 1.0) / 250.0), 0.0, 1.0)
    shaped = fft.irfft(fft.rfft(white) * _response(freqs, centers, gains_db, freq_scale, extra), n)
    rms = float(np.sqrt(np.mean(shaped**2)))
    return shaped / rms if rms > 0 else shaped


def step_onsets(
    rng: np.random.Generator, period: float, jitter: float, count: int
) -> np.ndarray:
    """Onset times in seconds; consecutive gaps are period * (1 +- jitter)."""
    first = FIRST_ONSET + 0.05 * rng.uniform()
    gaps = period * (1.0 + jitter * rng.uniform(-1.0, 1.0, count - 1))
    return first + np.concatenate([[0.0], np.cumsum(gaps)])


def _burst(
    rng: np.random.Generator,
    profile: SubjectProfile,
    gains_db: np.ndarray,
    sample_rate: int,
    condition: str,
) -> np.ndarray:
    decay = profile.decay * (BACKPACK_DECAY_FACTOR if condition == "B" else 1.0)
    n = int(round(6 * decay * sample_rate))
    t = np.arange(n) / sample_rate
    noise = shaped_noise(
        rng,
        n,
        sample_rate,
        gains_db,
        freq_scale=BACKPACK_FREQ_SCALE if condition == "B" else 1.0,
        low_pass_hz=COVER_CUTOFF_HZ if condition == "S" else None,
        low_boost_db=BACKPACK_LOW_BOOST_DB if condition == "B" else 0.0,
    )
    attack = COVER_ATTACK if condition == "S" else NORMAL_ATTACK
    rise = np.clip(t / attack, 0.0, 1.0)
    rise = 0.5 - 0.5 * np.cos(np.pi * rise)
    return noise * rise * np.exp(-t / decay)


def synthesize_recording(
    profile: SubjectProfile,
    condition: str,
    take: int,
    config: SynthConfig,
) -> MonoSignal:
    """
    One take of one subject under condition N, B or S.

    The waveform depends only on (config.seed, subject, condition, take).
    """
    rng = _rng(config.seed, profile.subject_id, CONDITION_INDEX[condition], take)
    sr = config.sample_rate

    period = profile.base_period * (1.0 + TAKE_TEMPO * rng.uniform(-1.0, 1.0))
    if condition == "B":
        period *= BACKPACK_PERIOD_FACTOR
    onsets = step_onsets(rng, period, config.period_jitter, config.steps_per_recording)
    length = int(round((onsets[-1] + period) * sr))

    step_gains = profile.step_spectrum + rng.normal(0.0, TAKE_SPECTRAL_DB, NUM_BANDS)
    signal = np.zeros(length)
    for onset in onsets:
        burst = _burst(rng, profile, step_gains, sr, condition)
        burst *= 10.0 ** (rng.uniform(-STEP_LEVEL_DB, STEP_LEVEL_DB) / 20.0)
        start = int(round(onset * sr))
        stop = min(start + burst.size, length)
        signal[start:stop] += burst[: stop - start]

    # rustle swells midway between consecutive steps
    t = np.arange(length) / sr
    knots = np.concatenate([[onsets[0] - period], onsets, [onsets[-1] + period]])
    phase = np.interp(t, knots, np.arange(knots.size, dtype=np.float64))
    rustle = shaped_noise(rng, length, sr, profile.rustle_spectrum)
    level = RUSTLE_LEVEL * (BACKPACK_RUSTLE_FACTOR if condition == "B" else 1.0)
    signal += level * rustle * np.sin(np.pi * phase) ** 2

    signal_power = float(np.mean(signal**2))
    noise_gain = np.sqrt(signal_power / 10.0 ** (config.snr_db / 10.0))
    background = shaped_noise(rng, length, sr, np.linspace(0.0, -12.0, NUM_BANDS))
    signal += noise_gain * background

    signal *= PEAK_TARGET / float(np.max(np.abs(signal)))
    signal *= 10.0 ** (rng.uniform(-TAKE_LEVEL_DB, TAKE_LEVEL_DB) / 20.0)
    peak = float(np.max(np.abs(signal)))
    if peak > PEAK_LIMIT:
        signal *= PEAK_LIMIT / peak
    return MonoSignal(samples=signal, sample_rate=sr)


def recording_plan(config: SynthConfig) -> List[Tuple[str, str, int, Role]]:
    """(subject, condition, take, role) for every recording in corpus order."""
    plan = []
    for index in range(1, config.num_subjects + 1):
        subject_id = subject_id_for(index)
        for condition, takes in config.takes_per_condition.items():
            for take in range(1, takes + 1):
                enrolling = condition == "N" and take <= config.enrollment_takes
                role = Role.ENROLLMENT if enrolling else Role.IDENTIFICATION
                plan.append((subject_id, condition, take, role))
    return plan


def recording_path(out_dir: Path, subject_id: str, condition: str, take: int) -> Path:
    return out_dir / AUDIO_DIR / subject_id / f"{subject_id}_{condition}{take}.wav"


def generate_corpus(config: SynthConfig, out_dir: Path, jobs: int = 1) -> Manifest:
    """
    Write every recording plus manifest.csv under out_dir.

    Returns:
        Manifest whose entries point at the written WAV files
    """
    out_dir = Path(out_dir)
    plan = recording_plan(config)
    profiles: Dict[str, SubjectProfile] = {
        sid: subject_profile(config.seed, sid, config) for sid in dict.fromkeys(p[0] for p in plan)
    }

    def render(item: Tuple[str, str, int, Role]) -> ManifestEntry:
        subject_id, condition, take, role = item
        path = recording_path(out_dir, subject_id, condition, take)
        signal = synthesize_recording(profiles[subject_id], condition, take, config)
        path.parent.mkdir(parents=True, exist_ok=True)
        write_wav(path, signal)
        return ManifestEntry(
            subject_id=subject_id,
            condition=condition,
            take=take,
            role=role,
            path=path,
            step_count=config.steps_per_recording,
        )

    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        entries = parallel_map(render, plan, jobs)
        manifest = Manifest(entries=entries, split=config.split)
        write_manifest(manifest, out_dir / MANIFEST_NAME)
    except OSError as e:
        raise CorpusWriteError(f"cannot write corpus: {e}", {"path": str(out_dir)}) from e

    logger.info(
        f"Generated {len(entries)} recordings for {len(profiles)} subjects in {out_dir} "
        f"(seed {config.seed}, SNR {config.snr_db} dB)"
    )
    return manifest
