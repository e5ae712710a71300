"""Acoustic gait recognition with cyclic HMMs."""

__version__ = "0.1.0"
