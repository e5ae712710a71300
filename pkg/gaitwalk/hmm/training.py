"""
Flat-start initialisation and embedded Baum-Welch re-estimation.

A recording with k known steps is explained by a composite model of k tied
copies of the unit chain (copy j's last state feeds copy j+1's first state
through the wrap edge). Statistics from every copy of every recording are
pooled into the single shared set of unit parameters.
"""

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..core.config import HmmConfig
from ..core.errors import DimensionMismatch, NumericalUnderflow, TooFewFrames, TopologyError
from ..features.sequence import FeatureSequence
from .decoding import forward_log_probs
from .model import GaussianHmm, allowed_transitions, chain_edges, uniform_log_transitions

logger = logging.getLogger(__name__)


def split_sizes(total: int, parts: int) -> List[int]:
    """
    Largest-remainder split of `total` items into `parts` near-equal runs.

    All quotas are equal, so the leftover items go to the earliest runs:
    split_sizes(10, 3) == [4, 3, 3].
    """
    base, remainder = divmod(total, parts)
    return [base + 1 if i < remainder else base for i in range(parts)]


def _check_inputs(
    sequences: Sequence[FeatureSequence], step_counts: Sequence[int], cyclic: bool
) -> int:
    if not sequences:
        raise TooFewFrames("no training sequences")
    if len(sequences) != len(step_counts):
        raise DimensionMismatch(
            f"{len(sequences)} sequences but {len(step_counts)} step counts"
        )
    dims = {seq.dim for seq in sequences}
    if len(dims) != 1:
        raise DimensionMismatch(f"sequences disagree on dimension: {sorted(dims)}")
    for k in step_counts:
        if k < 1:
            raise TopologyError(f"step count must be >= 1, got {k}")
        if k > 1 and not cyclic:
            raise TopologyError("a linear model cannot span several steps")
    return dims.pop()


def variance_floor(sequences: Sequence[FeatureSequence], config: HmmConfig) -> np.ndarray:
    """factor x global per-dimension variance, never below the absolute floor."""
    pooled = np.vstack([seq.frames for seq in sequences])
    return np.maximum(config.variance_floor_factor * pooled.var(axis=0), config.absolute_variance_floor)


def flat_start(
    sequences: Sequence[FeatureSequence],
    step_counts: Sequence[int],
    config: HmmConfig,
    subject_id: str = "",
) -> GaussianHmm:
    """
    Initialise a model from uniform time segmentation.

    Each recording is cut into k equal passes, each pass into S equal
    segments; state s is estimated from every frame in segment s.
    """
    dim = _check_inputs(sequences, step_counts, config.cyclic)
    num_states = config.num_states
    assigned: List[List[np.ndarray]] = [[] for _ in range(num_states)]

    for index, (seq, k) in enumerate(zip(sequences, step_counts)):
        start = 0
        for pass_len in split_sizes(seq.num_frames, k):
            if pass_len < num_states:
                raise TooFewFrames(
                    f"pass of {pass_len} frames is shorter than {num_states} states",
                    {"subject_id": subject_id, "sequence": index, "frames": seq.num_frames},
                )
            for state, seg_len in enumerate(split_sizes(pass_len, num_states)):
                assigned[state].append(seq.frames[start : start + seg_len])
                start += seg_len

    floor = variance_floor(sequences, config)
    means = np.empty((num_states, dim))
    variances = np.empty((num_states, dim))
    for state, chunks in enumerate(assigned):
        frames = np.vstack(chunks)
        means[state] = frames.mean(axis=0)
        variances[state] = np.maximum(frames.var(axis=0), floor)

    return GaussianHmm(
        subject_id=subject_id,
        log_transitions=uniform_log_transitions(num_states, config.cyclic),
        means=means,
        variances=variances,
        variance_floor=floor,
        cyclic=config.cyclic,
    )


def _composite_edges(model: GaussianHmm, copies: int) -> Tuple[np.ndarray, np.ndarray]:
    """Self-loop and advance vectors of k concatenated copies (no exit from the last)."""
    stay, advance = chain_edges(model.log_transitions)
    stay_c = np.tile(stay, copies)
    advance_c = np.tile(advance, copies)
    advance_c[-1] = -np.inf
    return stay_c, advance_c


def _backward_log_probs(
    emissions: np.ndarray, stay: np.ndarray, advance: np.ndarray
) -> np.ndarray:
    num_frames, num_states = emissions.shape
    beta = np.full((num_frames, num_states), -np.inf)
    beta[-1, -1] = 0.0
    for t in range(num_frames - 2, -1, -1):
        nxt = emissions[t + 1] + beta[t + 1]
        beta[t] = np.logaddexp(stay + nxt, advance + np.roll(nxt, -1))
    return beta


def _composite_emissions(model: GaussianHmm, seq: FeatureSequence, copies: int) -> np.ndarray:
    return np.tile(model.log_emissions(seq.frames), (1, copies))


def _check_length(model: GaussianHmm, seq: FeatureSequence, copies: int, index: int) -> None:
    if seq.num_frames < copies * model.num_states:
        raise TooFewFrames(
            f"{seq.num_frames} frames cannot cover {copies} passes of "
            f"{model.num_states} states",
            {"subject_id": model.subject_id, "sequence": index},
        )


def _sequence_log_likelihood(alpha: np.ndarray, model: GaussianHmm, index: int) -> float:
    total = float(alpha[-1, -1])
    if not np.isfinite(total):
        raise NumericalUnderflow(
            f"composite forward pass produced {total}",
            {"subject_id": model.subject_id, "sequence": index},
        )
    return total


def embedded_log_likelihood(
    model: GaussianHmm,
    sequences: Sequence[FeatureSequence],
    step_counts: Sequence[int],
) -> float:
    """Total log-likelihood of the training data under the composite models."""
    _check_inputs(sequences, step_counts, model.cyclic)
    total = 0.0
    for index, (seq, k) in enumerate(zip(sequences, step_counts)):
        _check_length(model, seq, k, index)
        stay, advance = _composite_edges(model, k)
        alpha = forward_log_probs(_composite_emissions(model, seq, k), stay, advance)
        total += _sequence_log_likelihood(alpha, model, index)
    return total


def floored_normalize(counts: np.ndarray, floor: float) -> Optional[np.ndarray]:
    """
    Maximise sum_j c_j log p_j subject to p_j >= floor and sum_j p_j = 1.

    Entries whose proportional share falls below the floor are pinned to it
    and the remaining mass is shared out again. Returns None if all counts
    are zero.
    """
    counts = np.asarray(counts, dtype=np.float64)
    if counts.size == 1:
        return np.ones(1)
    if counts.sum() <= 0.0:
        return None
    pinned = np.zeros(counts.size, dtype=bool)
    while True:
        free_mass = 1.0 - floor * pinned.sum()
        share = counts * free_mass / counts[~pinned].sum()
        probs = np.where(pinned, floor, share)
        newly = ~pinned & (probs < floor)
        if not newly.any():
            return probs
        pinned |= newly


def embedded_reestimate(
    model: GaussianHmm,
    sequences: Sequence[FeatureSequence],
    step_counts: Sequence[int],
    config: HmmConfig,
) -> Tuple[GaussianHmm, float]:
    """
    One Baum-Welch iteration over all recordings.

    Returns:
        (updated model, total data log-likelihood before the update)
    """
    _check_inputs(sequences, step_counts, model.cyclic)
    num_states, dim = model.num_states, model.dim
    if sequences[0].dim != dim:
        raise DimensionMismatch(f"model is {dim}-dim, features are {sequences[0].dim}-dim")

    occupancy = np.zeros(num_states)
    sum_x = np.zeros((num_states, dim))
    sum_xx = np.zeros((num_states, dim))
    stay_counts = np.zeros(num_states)
    advance_counts = np.zeros(num_states)
    total = 0.0

    for index, (seq, k) in enumerate(zip(sequences, step_counts)):
        _check_length(model, seq, k, index)
        emissions = _composite_emissions(model, seq, k)
        stay, advance = _composite_edges(model, k)
        alpha = forward_log_probs(emissions, stay, advance)
        beta = _backward_log_probs(emissions, stay, advance)
        seq_ll = _sequence_log_likelihood(alpha, model, index)
        total += seq_ll

        gamma = np.exp(alpha + beta - seq_ll)
        gamma_unit = gamma.reshape(seq.num_frames, k, num_states).sum(axis=1)
        occupancy += gamma_unit.sum(axis=0)
        sum_x += gamma_unit.T @ seq.frames
        sum_xx += gamma_unit.T @ (seq.frames**2)

        nxt = emissions[1:] + beta[1:] - seq_ll
        xi_stay = np.exp(alpha[:-1] + stay + nxt).sum(axis=0)
        xi_advance = np.exp(alpha[:-1] + advance + np.roll(nxt, -1, axis=1)).sum(axis=0)
        stay_counts += xi_stay.reshape(k, num_states).sum(axis=0)
        advance_counts += xi_advance.reshape(k, num_states).sum(axis=0)

    if not np.isfinite(total):
        raise NumericalUnderflow("non-finite training likelihood", {"subject_id": model.subject_id})

    means = model.means.copy()
    variances = model.variances.copy()
    visited = occupancy > 0.0
    means[visited] = sum_x[visited] / occupancy[visited, None]
    variances[visited] = sum_xx[visited] / occupancy[visited, None] - means[visited] ** 2
    variances = np.maximum(variances, model.variance_floor[None, :])

    log_trans = model.log_transitions.copy()
    mask = allowed_transitions(num_states, model.cyclic)
    for state in range(num_states):
        successor = (state + 1) % num_states
        if mask[state, successor] and successor != state:
            counts = np.array([stay_counts[state], advance_counts[state]])
            probs = floored_normalize(counts, config.min_self_loop)
            if probs is None:
                continue
            log_trans[state, state] = np.log(probs[0])
            log_trans[state, successor] = np.log(probs[1])
        else:
            log_trans[state, state] = 0.0

    updated = model.replace(log_transitions=log_trans, means=means, variances=variances)
    return updated, total


def train(
    sequences: Sequence[FeatureSequence],
    step_counts: Sequence[int],
    config: HmmConfig,
    subject_id: str = "",
) -> GaussianHmm:
    """
    Flat start followed by `training_iterations` re-estimation rounds.

    The returned model records the likelihood before every round plus the
    likelihood after the last one in `training_history`.
    """
    model = flat_start(sequences, step_counts, config, subject_id)
    history: List[float] = []
    for iteration in range(config.training_iterations):
        model, total = embedded_reestimate(model, sequences, step_counts, config)
        history.append(total)
        logger.debug(f"[{subject_id}] iteration {iteration + 1}: log-likelihood {total:.3f}")
    history.append(embedded_log_likelihood(model, sequences, step_counts))
    return model.replace(training_history=tuple(history))
