"""Recording input: WAV loading and channel downmix."""

from .io import AudioClip, MonoSignal, downmix, load_mono, load_wav, write_wav

__all__ = ["AudioClip", "MonoSignal", "downmix", "load_mono", "load_wav", "write_wav"]
