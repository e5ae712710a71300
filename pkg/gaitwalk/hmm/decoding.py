"""
Grammar-constrained Viterbi and forward scoring.

Both run over the chain lattice of one model: state j is entered from itself
or from j-1, and state 0 additionally from the last state when the grammar
enables the wrap edge. Every path starts in state 0.
"""

import logging

import numpy as np
from scipy.special import logsumexp

from ..core.errors import NoValidPath, NumericalUnderflow
from ..features.sequence import FeatureSequence
from .model import (
    DecodeGrammar,
    DecodeResult,
    GaussianHmm,
    chain_edges,
    count_steps,
    decode_transitions,
)

logger = logging.getLogger(__name__)


def _check_finite(value: float, where: str, model: GaussianHmm) -> None:
    if np.isnan(value):
        raise NumericalUnderflow(
            f"NaN reached in {where}", {"subject_id": model.subject_id}
        )


def _no_path(model: GaussianHmm, seq: FeatureSequence, grammar: DecodeGrammar) -> NoValidPath:
    return NoValidPath(
        f"no {grammar.value} path through {model.num_states} states "
        f"for {seq.num_frames} frames",
        {"subject_id": model.subject_id, "frames": seq.num_frames},
    )


def viterbi(
    model: GaussianHmm, seq: FeatureSequence, grammar: DecodeGrammar
) -> DecodeResult:
    """
    Best state path under the grammar.

    Ties prefer the lower-numbered predecessor, and the lowest final state
    among equally good MULTI_STEP endings, so decoding is deterministic.
    """
    emissions = model.log_emissions(seq.frames)
    num_frames, num_states = emissions.shape
    stay, advance = chain_edges(decode_transitions(model, grammar))
    # entering state j by advancing always comes from the lower-numbered state,
    # except for state 0 whose advance predecessor is the last state
    advance_wins_ties = np.arange(num_states) > 0

    delta = np.full(num_states, -np.inf)
    delta[0] = emissions[0, 0]
    came_by_advance = np.zeros((num_frames, num_states), dtype=bool)

    for t in range(1, num_frames):
        from_stay = delta + stay
        from_advance = np.roll(delta + advance, 1)
        use_advance = (from_advance > from_stay) | (
            (from_advance == from_stay) & advance_wins_ties
        )
        came_by_advance[t] = use_advance
        delta = np.where(use_advance, from_advance, from_stay) + emissions[t]

    if grammar is DecodeGrammar.SINGLE_PASS:
        final_state = num_states - 1
    else:
        final_state = int(np.argmax(delta))
    best = float(delta[final_state])
    _check_finite(best, "viterbi", model)
    if not np.isfinite(best):
        raise _no_path(model, seq, grammar)

    path = np.empty(num_frames, dtype=np.int64)
    state = final_state
    for t in range(num_frames - 1, 0, -1):
        path[t] = state
        if came_by_advance[t, state]:
            state = (state - 1) % num_states
    path[0] = state

    if grammar is DecodeGrammar.SINGLE_PASS:
        steps, boundaries = 1, ()
    else:
        steps, boundaries = count_steps(path, num_states)
    return DecodeResult(
        log_likelihood=best,
        state_path=path,
        step_count=steps,
        step_boundaries=boundaries,
    )


def forward_log_probs(
    emissions: np.ndarray, stay: np.ndarray, advance: np.ndarray
) -> np.ndarray:
    """(T, S) forward variables on the chain lattice, all mass starting in state 0."""
    num_frames, num_states = emissions.shape
    alpha = np.full((num_frames, num_states), -np.inf)
    alpha[0, 0] = emissions[0, 0]
    for t in range(1, num_frames):
        prev = alpha[t - 1]
        alpha[t] = np.logaddexp(prev + stay, np.roll(prev + advance, 1)) + emissions[t]
    return alpha


def log_likelihood(
    model: GaussianHmm, seq: FeatureSequence, grammar: DecodeGrammar
) -> float:
    """Sum over all admissible paths; never below the Viterbi score."""
    emissions = model.log_emissions(seq.frames)
    stay, advance = chain_edges(decode_transitions(model, grammar))
    alpha = forward_log_probs(emissions, stay, advance)
    if grammar is DecodeGrammar.SINGLE_PASS:
        total = float(alpha[-1, -1])
    else:
        total = float(logsumexp(alpha[-1]))
    _check_finite(total, "forward pass", model)
    if not np.isfinite(total):
        raise _no_path(model, seq, grammar)
    return total
