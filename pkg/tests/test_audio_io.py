"""
WAV loading and downmix tests.
"""

import struct

import numpy as np
import pytest

from gaitwalk.audio.io import MonoSignal, downmix, load_mono, load_wav, parse_header, write_wav
from gaitwalk.core.errors import CorruptHeader, MissingFile, UnsupportedEncoding

from helpers import wav_bytes


def test_16bit_mono_is_normalized():
    raw = wav_bytes(np.array([0, 16384, -32768, 32767], dtype=np.int16))
    clip = load_wav(raw)
    assert clip.channel_count == 1
    assert clip.sample_rate == 16000
    np.testing.assert_allclose(clip.samples[0], [0.0, 0.5, -1.0, 32767 / 32768])


def test_8bit_is_offset_binary():
    clip = load_wav(wav_bytes(np.array([128, 255, 0], dtype=np.uint8)))
    np.testing.assert_allclose(clip.samples[0], [0.0, 127 / 128, -1.0])


def test_stereo_downmix_averages_channels():
    data = np.array([[1000, 3000], [-2000, 2000], [0, 32767]], dtype=np.int16)
    clip = load_wav(wav_bytes(data, sample_rate=8000))
    assert clip.samples.shape == (2, 3)
    assert clip.num_frames == 3
    mono = downmix(clip)
    np.testing.assert_allclose(mono.samples, data.mean(axis=1) / 32768.0)
    assert mono.sample_rate == 8000


def test_truncated_data_chunk_raises_corrupt_header():
    raw = wav_bytes(np.zeros(100, dtype=np.int16))
    with pytest.raises(CorruptHeader, match="truncated"):
        load_wav(raw[:-10])


def test_not_riff():
    with pytest.raises(CorruptHeader):
        load_wav(b"this is not a wav file at all")


def test_missing_file(tmp_path):
    with pytest.raises(MissingFile):
        load_wav(tmp_path / "absent.wav")


def test_compressed_encoding_rejected():
    fmt = struct.pack("<HHIIHH", 2, 1, 16000, 8000, 1, 4)  # ADPCM
    data = b"\x00" * 8
    body = b"WAVE" + b"fmt " + struct.pack("<I", len(fmt)) + fmt
    body += b"data" + struct.pack("<I", len(data)) + data
    raw = b"RIFF" + struct.pack("<I", len(body)) + body
    with pytest.raises(UnsupportedEncoding):
        load_wav(raw)


def test_header_skips_unknown_chunks():
    raw = wav_bytes(np.zeros(4, dtype=np.int16))
    extra = b"LIST" + struct.pack("<I", 3) + b"abc\x00"
    patched = raw[:12] + extra + raw[12:]
    patched = patched[:4] + struct.pack("<I", len(patched) - 8) + patched[8:]
    header = parse_header(patched)
    assert header.channels == 1
    assert header.bits_per_sample == 16
    assert header.data_bytes == 8


def test_write_then_load(tmp_path):
    samples = np.linspace(-0.9, 0.9, 50)
    path = tmp_path / "ramp.wav"
    write_wav(path, MonoSignal(samples=samples, sample_rate=16000))
    loaded = load_mono(path)
    assert len(loaded) == 50
    np.testing.assert_allclose(loaded.samples, samples, atol=0.5 / 2**15)


def test_write_clips_to_pcm_range(tmp_path):
    path = tmp_path / "edges.wav"
    samples = np.array([-1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5])
    write_wav(path, MonoSignal(samples=samples, sample_rate=16000))
    loaded = load_mono(path).samples
    assert loaded[0] == loaded[1] == -1.0
    assert loaded[2] == -0.5 and loaded[3] == 0.0 and loaded[4] == 0.5
    assert loaded[5] == loaded[6] == 32767 / 2**15
