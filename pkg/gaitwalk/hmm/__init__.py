"""Cyclic and left-right single-Gaussian HMMs: training and decoding."""

from .decoding import log_likelihood, viterbi
from .model import (
    DecodeGrammar,
    DecodeResult,
    GaussianHmm,
    allowed_transitions,
    count_steps,
    decode_transitions,
)
from .training import (
    embedded_log_likelihood,
    embedded_reestimate,
    flat_start,
    split_sizes,
    train,
)

__all__ = [
    "DecodeGrammar",
    "DecodeResult",
    "GaussianHmm",
    "allowed_transitions",
    "count_steps",
    "decode_transitions",
    "embedded_log_likelihood",
    "embedded_reestimate",
    "flat_start",
    "log_likelihood",
    "split_sizes",
    "train",
    "viterbi",
]
