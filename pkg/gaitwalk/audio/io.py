"""
PCM WAV loading and channel downmixing.

The RIFF structure is checked here so malformed files map onto precise
errors; sample decoding itself is left to scipy.io.wavfile.
"""

import io
import logging
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import BinaryIO, Union

import numpy as np
from scipy.io import wavfile

from ..core.errors import AudioError, CorruptHeader, MissingFile, UnsupportedEncoding

logger = logging.getLogger(__name__)

WAVE_FORMAT_PCM = 0x0001
WAVE_FORMAT_IEEE_FLOAT = 0x0003
WAVE_FORMAT_EXTENSIBLE = 0xFFFE

SUPPORTED_PCM_BITS = (8, 16, 24, 32)

AudioSource = Union[str, Path, BinaryIO, bytes]


@dataclass(frozen=True)
class AudioClip:
    """Multi-channel recording, samples shaped (channels, N) in [-1, 1]."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self) -> None:
        if self.samples.ndim != 2 or self.samples.shape[1] < 1:
            raise AudioError("clip must hold at least one frame per channel")
        if self.sample_rate <= 0:
            raise AudioError(f"invalid sample rate {self.sample_rate}")

    @property
    def channel_count(self) -> int:
        return int(self.samples.shape[0])

    @property
    def num_frames(self) -> int:
        return int(self.samples.shape[1])

    @property
    def duration(self) -> float:
        return self.num_frames / self.sample_rate


@dataclass(frozen=True)
class MonoSignal:
    """Single-channel signal the feature front-end consumes."""

    samples: np.ndarray
    sample_rate: int

    def __len__(self) -> int:
        return int(self.samples.shape[0])

    @property
    def duration(self) -> float:
        return len(self) / self.sample_rate


@dataclass(frozen=True)
class WavHeader:
    format_tag: int
    channels: int
    sample_rate: int
    bits_per_sample: int
    data_bytes: int


def _read_source(source: AudioSource) -> tuple[bytes, str]:
    if isinstance(source, bytes):
        return source, "<bytes>"
    if isinstance(source, (str, Path)):
        path = Path(source)
        if not path.is_file():
            raise MissingFile(f"audio file not found: {path}", {"path": str(path)})
        return path.read_bytes(), str(path)
    return source.read(), getattr(source, "name", "<stream>")


def parse_header(raw: bytes, origin: str = "<bytes>") -> WavHeader:
    """
    Walk the RIFF chunks and return the `fmt ` description.

    Unknown chunks are skipped; `fmt ` must precede `data` and both must be
    complete inside the file.
    """
    ctx = {"path": origin}
    if len(raw) < 12 or raw[0:4] != b"RIFF" or raw[8:12] != b"WAVE":
        raise CorruptHeader("not a RIFF/WAVE file", ctx)

    fmt = None
    offset = 12
    while offset + 8 <= len(raw):
        chunk_id = raw[offset : offset + 4]
        (size,) = struct.unpack("<I", raw[offset + 4 : offset + 8])
        body_start = offset + 8
        body_end = body_start + size
        if chunk_id == b"fmt ":
            if size < 16 or body_end > len(raw):
                raise CorruptHeader("truncated fmt chunk", ctx)
            tag, channels, rate, _, _, bits = struct.unpack(
                "<HHIIHH", raw[body_start : body_start + 16]
            )
            if tag == WAVE_FORMAT_EXTENSIBLE:
                if size < 40:
                    raise CorruptHeader("truncated extensible fmt chunk", ctx)
                (tag,) = struct.unpack("<H", raw[body_start + 24 : body_start + 26])
            fmt = (tag, channels, rate, bits)
        elif chunk_id == b"data":
            if fmt is None:
                raise CorruptHeader("data chunk before fmt chunk", ctx)
            if body_end > len(raw):
                raise CorruptHeader(
                    f"data chunk truncated ({len(raw) - body_start} of {size} bytes)", ctx
                )
            tag, channels, rate, bits = fmt
            return WavHeader(tag, channels, rate, bits, size)
        offset = body_end + (size & 1)

    if fmt is None:
        raise CorruptHeader("missing fmt chunk", ctx)
    raise CorruptHeader("missing data chunk", ctx)


def _check_encoding(header: WavHeader, origin: str) -> None:
    ctx = {"path": origin, "format_tag": header.format_tag, "bits": header.bits_per_sample}
    if header.format_tag == WAVE_FORMAT_PCM:
        if header.bits_per_sample not in SUPPORTED_PCM_BITS:
            raise UnsupportedEncoding("unsupported PCM bit depth", ctx)
    elif header.format_tag == WAVE_FORMAT_IEEE_FLOAT:
        if header.bits_per_sample != 32:
            raise UnsupportedEncoding("only 32-bit float WAV is supported", ctx)
    else:
        raise UnsupportedEncoding("compressed WAV encodings are not supported", ctx)
    if header.channels < 1 or header.sample_rate < 1:
        raise CorruptHeader("fmt chunk declares no channels or no sample rate", ctx)
    block = header.channels * ((header.bits_per_sample + 7) // 8)
    if header.data_bytes < block:
        raise CorruptHeader("data chunk holds no complete frame", ctx)


def _normalize(data: np.ndarray) -> np.ndarray:
    """Integer PCM divided by 2**(bits-1); float data clipped to [-1, 1]."""
    if data.dtype == np.uint8:
        return (data.astype(np.float64) - 128.0) / 128.0
    if data.dtype == np.int16:
        return data.astype(np.float64) / 2.0**15
    if data.dtype == np.int32:
        # scipy left-justifies 24-bit samples into int32
        return data.astype(np.float64) / 2.0**31
    return np.clip(data.astype(np.float64), -1.0, 1.0)


def load_wav(source: AudioSource) -> AudioClip:
    """
    Load a PCM WAV recording.

    Args:
        source: file path, open binary stream or raw bytes

    Returns:
        AudioClip with samples shaped (channels, N), normalized to [-1, 1]
    """
    raw, origin = _read_source(source)
    header = parse_header(raw, origin)
    _check_encoding(header, origin)

    try:
        rate, data = wavfile.read(io.BytesIO(raw))
    except ValueError as e:
        raise CorruptHeader(f"unreadable WAV data: {e}", {"path": origin}) from e

    samples = _normalize(np.asarray(data))
    if samples.ndim == 1:
        samples = samples[np.newaxis, :]
    else:
        samples = samples.T
    if not np.all(np.isfinite(samples)):
        raise AudioError("recording contains non-finite samples", {"path": origin})

    logger.debug(
        f"Loaded {origin}: {samples.shape[0]} channel(s), "
        f"{samples.shape[1]} frames @ {rate} Hz"
    )
    return AudioClip(samples=np.ascontiguousarray(samples), sample_rate=int(rate))


def downmix(clip: AudioClip) -> MonoSignal:
    """Average the channels sample by sample; mono input passes through."""
    if clip.channel_count == 1:
        mono = clip.samples[0].copy()
    else:
        mono = clip.samples.mean(axis=0)
    return MonoSignal(samples=mono, sample_rate=clip.sample_rate)


def load_mono(source: AudioSource) -> MonoSignal:
    """Convenience wrapper: load_wav followed by downmix."""
    return downmix(load_wav(source))


def write_wav(path: Path, signal: MonoSignal) -> None:
    """Write a mono signal as 16-bit PCM, scaled by 2**15 like the reader."""
    scaled = np.round(np.asarray(signal.samples, dtype=np.float64) * 2.0**15)
    pcm = np.clip(scaled, -32768, 32767).astype(np.int16)
    wavfile.write(str(path), signal.sample_rate, pcm)
