"""
Flat start and embedded re-estimation tests.
"""

import itertools

import numpy as np
import pytest
from scipy.special import logsumexp

from gaitwalk.core.config import HmmConfig
from gaitwalk.core.errors import TooFewFrames, TopologyError
from gaitwalk.hmm.training import (
    embedded_log_likelihood,
    embedded_reestimate,
    flat_start,
    floored_normalize,
    split_sizes,
    train,
)

from helpers import random_model, sequence


def test_split_sizes():
    assert split_sizes(10, 3) == [4, 3, 3]
    assert split_sizes(9, 3) == [3, 3, 3]
    assert split_sizes(5, 1) == [5]
    assert sum(split_sizes(101, 7)) == 101


def test_flat_start_uniform_segmentation():
    config = HmmConfig(num_states=3, training_iterations=0, cyclic=True)
    model = flat_start([sequence(np.arange(12.0))], [2], config, "s1")
    np.testing.assert_allclose(model.means[:, 0], [3.5, 5.5, 7.5])
    np.testing.assert_allclose(model.variances[:, 0], [9.25, 9.25, 9.25])
    np.testing.assert_allclose(model.transitions[0, :2], [0.5, 0.5])
    np.testing.assert_allclose(model.transitions[2, [0, 2]], [0.5, 0.5])
    assert model.subject_id == "s1"


def test_flat_start_linear_last_state_only_loops():
    config = HmmConfig(num_states=3, cyclic=False)
    model = flat_start([sequence(np.arange(9.0))], [1], config)
    assert model.transitions[2, 2] == 1.0
    assert model.transitions[2, 0] == 0.0


def test_constant_data_uses_absolute_floor():
    config = HmmConfig(num_states=2)
    model = flat_start([sequence(np.full(10, 3.0))], [1], config)
    np.testing.assert_allclose(model.variances, config.absolute_variance_floor)


def test_flat_start_needs_a_frame_per_state():
    config = HmmConfig(num_states=3)
    with pytest.raises(TooFewFrames):
        flat_start([sequence(np.arange(5.0))], [2], config)


def test_linear_model_cannot_span_several_steps():
    config = HmmConfig(num_states=3, cyclic=False)
    with pytest.raises(TopologyError):
        flat_start([sequence(np.arange(20.0))], [2], config)


def test_floored_normalize():
    np.testing.assert_allclose(floored_normalize(np.array([3.0, 1.0]), 1e-3), [0.75, 0.25])
    np.testing.assert_allclose(floored_normalize(np.array([0.0, 10.0]), 0.1), [0.1, 0.9])
    assert floored_normalize(np.array([0.0, 0.0]), 0.1) is None


def _two_way(a: float, b: float, floor: float):
    p, q = a / (a + b), b / (a + b)
    if q < floor:
        return 1.0 - floor, floor
    if p < floor:
        return floor, 1.0 - floor
    return p, q


@pytest.mark.parametrize("cyclic", [True, False])
def test_reestimation_matches_expected_counts(cyclic):
    rng = np.random.default_rng(11 if cyclic else 12)
    config = HmmConfig(num_states=2, min_self_loop=1e-3, cyclic=cyclic)
    model = random_model(rng, 2, 1, cyclic)
    x = rng.normal(0.0, 1.5, 4)
    updated, total = embedded_reestimate(model, [sequence(x)], [1], config)

    log_trans = model.log_transitions
    emissions = model.log_emissions(x[:, None])
    paths, scores = [], []
    for tail in itertools.product(range(2), repeat=3):
        path = (0, *tail)
        if path[-1] != 1 or any(a == 1 and b == 0 for a, b in zip(path, path[1:])):
            continue
        score = emissions[0, 0] + sum(
            log_trans[path[t - 1], path[t]] + emissions[t, path[t]] for t in range(1, 4)
        )
        paths.append(path)
        scores.append(score)
    norm = logsumexp(scores)
    weights = np.exp(np.array(scores) - norm)
    assert total == pytest.approx(norm, abs=1e-9)

    gamma = np.zeros((4, 2))
    moves = np.zeros((2, 2))
    for w, path in zip(weights, paths):
        for t, s in enumerate(path):
            gamma[t, s] += w
        for a, b in zip(path, path[1:]):
            moves[a, b] += w
    occupancy = gamma.sum(axis=0)
    means = gamma.T @ x / occupancy
    variances = np.maximum(gamma.T @ x**2 / occupancy - means**2, model.variance_floor[0])
    np.testing.assert_allclose(updated.means[:, 0], means, atol=1e-9)
    np.testing.assert_allclose(updated.variances[:, 0], variances, atol=1e-9)

    stay0, advance0 = _two_way(moves[0, 0], moves[0, 1], config.min_self_loop)
    assert updated.transitions[0, 0] == pytest.approx(stay0, abs=1e-9)
    assert updated.transitions[0, 1] == pytest.approx(advance0, abs=1e-9)
    if cyclic:
        stay1, wrap1 = _two_way(moves[1, 1], moves[1, 0], config.min_self_loop)
        assert updated.transitions[1, 1] == pytest.approx(stay1, abs=1e-9)
        assert updated.transitions[1, 0] == pytest.approx(wrap1, abs=1e-9)
    else:
        assert updated.transitions[1, 1] == 1.0


def _training_set(rng: np.random.Generator):
    pattern = rng.normal(0.0, 3.0, (3, 2))
    sequences, counts = [], []
    for _ in range(3):
        steps = int(rng.integers(2, 4))
        chunks = []
        for _ in range(steps):
            for state in range(3):
                length = int(rng.integers(3, 6))
                chunks.append(pattern[state] + rng.normal(0.0, 1.0, (length, 2)))
        sequences.append(sequence(np.vstack(chunks)))
        counts.append(steps)
    return sequences, counts


def test_likelihood_never_decreases():
    rng = np.random.default_rng(99)
    config = HmmConfig(num_states=3, training_iterations=6, cyclic=True)
    for _ in range(20):
        sequences, counts = _training_set(rng)
        model = train(sequences, counts, config, "walker")
        history = np.array(model.training_history)
        assert history.size == 7
        assert np.all(np.diff(history) >= -1e-6)
        assert history[-1] == pytest.approx(embedded_log_likelihood(model, sequences, counts))


def test_training_is_deterministic():
    sequences, counts = _training_set(np.random.default_rng(3))
    config = HmmConfig(num_states=3, training_iterations=4)
    first = train(sequences, counts, config, "a")
    second = train(sequences, counts, config, "a")
    np.testing.assert_array_equal(first.means, second.means)
    np.testing.assert_array_equal(first.variances, second.variances)
    np.testing.assert_array_equal(first.log_transitions, second.log_transitions)
    assert first.training_history == second.training_history


def test_variances_respect_floor():
    sequences, counts = _training_set(np.random.default_rng(4))
    config = HmmConfig(num_states=3, training_iterations=3, variance_floor_factor=0.5)
    model = train(sequences, counts, config)
    assert np.all(model.variances >= model.variance_floor[None, :])


def test_separated_states_reach_a_fixed_point():
    rng = np.random.default_rng(21)
    means = np.array([[0.0, 0.0], [100.0, 0.0], [0.0, 100.0]])
    model = random_model(rng, 3, 2, cyclic=True, subject_id="walker").replace(
        means=means, variances=np.ones((3, 2))
    )
    sequences, counts = [], []
    for steps in (2, 3, 2):
        chunks = [
            means[state] + rng.normal(size=(int(rng.integers(4, 8)), 2))
            for _ in range(steps)
            for state in range(3)
        ]
        sequences.append(sequence(np.vstack(chunks)))
        counts.append(steps)

    config = HmmConfig(num_states=3)
    once, _ = embedded_reestimate(model, sequences, counts, config)
    twice, _ = embedded_reestimate(once, sequences, counts, config)
    assert np.max(np.abs(twice.means - once.means)) < 1e-3
    assert np.max(np.abs(twice.variances - once.variances)) < 1e-3
    finite = np.isfinite(once.log_transitions)
    drift = np.exp(twice.log_transitions[finite]) - np.exp(once.log_transitions[finite])
    assert np.max(np.abs(drift)) < 1e-3
