"""
MFCC front-end: pre-emphasis, Hamming-windowed frames, mel filterbank,
log compression, orthonormal DCT-II, then delta and acceleration regression.
"""

import logging

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.fft import dct, rfft

from ..audio.io import MonoSignal
from ..core.config import MfccConfig
from ..core.errors import DimensionMismatch, SampleRateMismatch, SignalTooShort
from .sequence import FeatureSequence

logger = logging.getLogger(__name__)


def hz_to_mel(freq: np.ndarray | float) -> np.ndarray:
    return 2595.0 * np.log10(1.0 + np.asarray(freq, dtype=np.float64) / 700.0)


def mel_to_hz(mel: np.ndarray | float) -> np.ndarray:
    return 700.0 * (10.0 ** (np.asarray(mel, dtype=np.float64) / 2595.0) - 1.0)


def next_pow2(n: int) -> int:
    return 1 << max(0, int(n - 1).bit_length())


def frame_count(num_samples: int, window: int, hop: int) -> int:
    """T = 1 + floor((N - win) / hop); zero when the signal is shorter than a window."""
    if num_samples < window:
        return 0
    return 1 + (num_samples - window) // hop


def mel_filterbank(num_filters: int, nfft: int, sample_rate: int) -> np.ndarray:
    """
    Triangular filters equally spaced on the mel scale from 0 Hz to Nyquist.

    Returns:
        (num_filters, nfft // 2 + 1) weight matrix over the one-sided spectrum
    """
    edges = mel_to_hz(np.linspace(0.0, hz_to_mel(sample_rate / 2.0), num_filters + 2))
    bins = np.arange(nfft // 2 + 1) * sample_rate / nfft
    lower, center, upper = edges[:-2, None], edges[1:-1, None], edges[2:, None]
    rising = (bins[None, :] - lower) / (center - lower)
    falling = (upper - bins[None, :]) / (upper - center)
    return np.maximum(0.0, np.minimum(rising, falling))


def filter_center_frequencies(config: MfccConfig) -> np.ndarray:
    """Center frequency in Hz of every mel filter."""
    top = hz_to_mel(config.expected_sample_rate / 2.0)
    return mel_to_hz(np.linspace(0.0, top, config.num_mel_filters + 2))[1:-1]


def compute_mfcc(signal: MonoSignal, config: MfccConfig) -> FeatureSequence:
    """
    Static cepstra (coefficients 0 .. num_cepstra-1) for every frame.

    Args:
        signal: mono recording at config.expected_sample_rate
        config: front-end parameters

    Returns:
        FeatureSequence with D = num_cepstra
    """
    if signal.sample_rate != config.expected_sample_rate:
        raise SampleRateMismatch(
            f"signal is {signal.sample_rate} Hz, front-end expects "
            f"{config.expected_sample_rate} Hz",
            {"sample_rate": signal.sample_rate},
        )

    window = config.window_samples
    hop = config.hop_samples
    num_frames = frame_count(len(signal), window, hop)
    if num_frames < 1:
        raise SignalTooShort(
            f"signal has {len(signal)} samples, one frame needs {window}",
            {"samples": len(signal)},
        )

    x = np.asarray(signal.samples, dtype=np.float64)
    emphasized = np.concatenate([x[:1], x[1:] - config.preemphasis * x[:-1]])

    frames = sliding_window_view(emphasized, window)[::hop][:num_frames]
    frames = frames * np.hamming(window)

    nfft = next_pow2(window)
    magnitude = np.abs(rfft(frames, n=nfft, axis=1))
    fbank = mel_filterbank(config.num_mel_filters, nfft, config.expected_sample_rate)
    energies = magnitude @ fbank.T
    log_energies = np.log(np.maximum(energies, config.log_floor))

    cepstra = dct(log_energies, type=2, norm="ortho", axis=1)[:, : config.num_cepstra]
    return FeatureSequence(frames=cepstra, frame_shift=config.frame_shift)


def _regression(values: np.ndarray, window: int) -> np.ndarray:
    """d_t = sum_k k (c_{t+k} - c_{t-k}) / (2 sum_k k^2), edges replicated."""
    num_frames = values.shape[0]
    padded = np.pad(values, ((window, window), (0, 0)), mode="edge")
    denom = 2.0 * sum(k * k for k in range(1, window + 1))
    out = np.zeros_like(values, dtype=np.float64)
    for k in range(1, window + 1):
        ahead = padded[window + k : window + k + num_frames]
        behind = padded[window - k : window - k + num_frames]
        out += k * (ahead - behind)
    return out / denom


def append_dynamics(
    seq: FeatureSequence, window: int, num_cepstra: int | None = None
) -> FeatureSequence:
    """
    Append delta and acceleration blocks: columns become [static | delta | accel].
    """
    if num_cepstra is not None and seq.dim != num_cepstra:
        raise DimensionMismatch(
            f"dynamics expect {num_cepstra} static coefficients, got {seq.dim}"
        )
    delta = _regression(seq.frames, window)
    accel = _regression(delta, window)
    return FeatureSequence(
        frames=np.hstack([seq.frames, delta, accel]), frame_shift=seq.frame_shift
    )
