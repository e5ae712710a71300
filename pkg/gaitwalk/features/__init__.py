"""Feature front-end: MFCC, dynamics and enrollment PCA."""

from .mfcc import append_dynamics, compute_mfcc, frame_count, mel_filterbank
from .pca import PcaTransform, apply_pca, fit_pca
from .pipeline import extract_features, fit_enrollment_pca, pca_input
from .sequence import FeatureSequence

__all__ = [
    "FeatureSequence",
    "PcaTransform",
    "append_dynamics",
    "apply_pca",
    "compute_mfcc",
    "extract_features",
    "fit_enrollment_pca",
    "fit_pca",
    "frame_count",
    "mel_filterbank",
    "pca_input",
]
