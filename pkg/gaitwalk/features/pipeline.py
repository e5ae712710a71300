"""
Front-end pipeline: MFCC -> [PCA] -> dynamics -> [PCA].

Where the rotation sits is chosen by MfccConfig.pca_before_dynamics; the
default rotates the full 39-dim vectors.
"""

from typing import Optional, Sequence

from ..audio.io import MonoSignal
from ..core.config import MfccConfig
from .mfcc import append_dynamics, compute_mfcc
from .pca import PcaTransform, apply_pca, fit_pca
from .sequence import FeatureSequence


def pca_input(signal: MonoSignal, config: MfccConfig) -> FeatureSequence:
    """Features at the pipeline stage the PCA is fitted on."""
    static = compute_mfcc(signal, config)
    if config.pca_before_dynamics:
        return static
    return append_dynamics(static, config.delta_window, config.num_cepstra)


def fit_enrollment_pca(
    signals: Sequence[MonoSignal], config: MfccConfig
) -> PcaTransform:
    """Fit the rotation on pooled enrollment recordings only."""
    return fit_pca([pca_input(signal, config) for signal in signals])


def extract_features(
    signal: MonoSignal, config: MfccConfig, pca: Optional[PcaTransform] = None
) -> FeatureSequence:
    """Observation vectors the HMMs are trained on and decode."""
    static = compute_mfcc(signal, config)
    if pca is not None and config.pca_before_dynamics:
        static = apply_pca(pca, static)
    full = append_dynamics(static, config.delta_window, config.num_cepstra)
    if pca is not None and not config.pca_before_dynamics:
        full = apply_pca(pca, full)
    return full
