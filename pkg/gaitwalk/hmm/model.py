"""
Single-Gaussian HMMs with linear left-right or cyclic topology.

States are 0-based internally (state 1 of the literature is index 0). Each
state may loop on itself or advance to the next state; a cyclic model also
allows the wrap edge from the last state back to the first.
"""

import enum
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from ..core.errors import DimensionMismatch, ModelStoreError, TopologyError
from ..models.documents import HmmDocument

LOG_2PI = float(np.log(2.0 * np.pi))


class DecodeGrammar(str, enum.Enum):
    """SINGLE_PASS: one pass, must end in the last state. MULTI_STEP: any repetitions."""

    SINGLE_PASS = "single"
    MULTI_STEP = "multi"


def allowed_transitions(num_states: int, cyclic: bool) -> np.ndarray:
    """Boolean S x S mask of the edges a topology permits."""
    mask = np.eye(num_states, dtype=bool)
    idx = np.arange(num_states - 1)
    mask[idx, idx + 1] = True
    if cyclic:
        mask[num_states - 1, 0] = True
    return mask


def uniform_log_transitions(num_states: int, cyclic: bool) -> np.ndarray:
    """Uniform probability over each state's allowed successors, in log domain."""
    mask = allowed_transitions(num_states, cyclic)
    probs = mask / mask.sum(axis=1, keepdims=True)
    with np.errstate(divide="ignore"):
        return np.log(probs)


@dataclass(frozen=True)
class GaussianHmm:
    """Per-subject model with diagonal-covariance Gaussian emissions."""

    subject_id: str
    log_transitions: np.ndarray  # (S, S), -inf where the topology forbids
    means: np.ndarray  # (S, D)
    variances: np.ndarray  # (S, D)
    variance_floor: np.ndarray  # (D,)
    cyclic: bool
    training_history: Tuple[float, ...] = field(default=())

    def __post_init__(self) -> None:
        num_states, dim = self.means.shape
        if num_states < 2:
            raise TopologyError("a model needs at least two states")
        if self.variances.shape != (num_states, dim):
            raise DimensionMismatch("variances must match means in shape")
        if self.log_transitions.shape != (num_states, num_states):
            raise TopologyError("transition matrix must be S x S")
        mask = allowed_transitions(num_states, self.cyclic)
        if np.any(np.isfinite(self.log_transitions[~mask])):
            raise TopologyError(
                "transition matrix assigns probability to a forbidden edge",
                {"subject_id": self.subject_id},
            )

    @property
    def num_states(self) -> int:
        return int(self.means.shape[0])

    @property
    def dim(self) -> int:
        return int(self.means.shape[1])

    @property
    def transitions(self) -> np.ndarray:
        """Transition matrix in the probability domain."""
        return np.exp(self.log_transitions)

    def log_emissions(self, frames: np.ndarray) -> np.ndarray:
        """
        Log-density of every frame under every state.

        Args:
            frames: (T, D) observations

        Returns:
            (T, S) matrix of log N(x_t; mean_s, diag(var_s))
        """
        if frames.ndim != 2 or frames.shape[1] != self.dim:
            raise DimensionMismatch(
                f"model expects {self.dim}-dim frames, got shape {frames.shape}",
                {"subject_id": self.subject_id},
            )
        log_norm = -0.5 * (self.dim * LOG_2PI + np.log(self.variances).sum(axis=1))
        diff = frames[:, None, :] - self.means[None, :, :]
        quad = np.sum(diff * diff / self.variances[None, :, :], axis=2)
        return log_norm[None, :] - 0.5 * quad

    def replace(self, **changes: object) -> "GaussianHmm":
        values = {
            "subject_id": self.subject_id,
            "log_transitions": self.log_transitions,
            "means": self.means,
            "variances": self.variances,
            "variance_floor": self.variance_floor,
            "cyclic": self.cyclic,
            "training_history": self.training_history,
        }
        values.update(changes)
        return GaussianHmm(**values)  # type: ignore[arg-type]

    def to_document(self) -> HmmDocument:
        log_trans = [
            [float(v) if np.isfinite(v) else None for v in row]
            for row in self.log_transitions
        ]
        return HmmDocument(
            subject_id=self.subject_id,
            states=self.num_states,
            dim=self.dim,
            cyclic=self.cyclic,
            log_transitions=log_trans,
            means=self.means.tolist(),
            variances=self.variances.tolist(),
            variance_floor=self.variance_floor.tolist(),
            training_history=list(self.training_history),
        )

    @classmethod
    def from_document(cls, doc: HmmDocument) -> "GaussianHmm":
        log_trans = np.array(
            [[-np.inf if v is None else v for v in row] for row in doc.log_transitions],
            dtype=np.float64,
        )
        variances = np.asarray(doc.variances, dtype=np.float64)
        if np.any(variances <= 0):
            raise ModelStoreError(
                "model document holds non-positive variances",
                {"subject_id": doc.subject_id},
            )
        return cls(
            subject_id=doc.subject_id,
            log_transitions=log_trans,
            means=np.asarray(doc.means, dtype=np.float64),
            variances=variances,
            variance_floor=np.asarray(doc.variance_floor, dtype=np.float64),
            cyclic=doc.cyclic,
            training_history=tuple(doc.training_history),
        )


@dataclass(frozen=True)
class DecodeResult:
    """Best path of a decode and the steps it implies."""

    log_likelihood: float
    state_path: np.ndarray  # (T,) 0-based state indices
    step_count: int
    step_boundaries: Tuple[int, ...]  # frames where the wrap edge was taken


def chain_edges(log_transitions: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Split an S x S log matrix into per-state self-loop and advance vectors.

    advance[i] is the edge i -> i+1; advance[S-1] is the wrap edge S-1 -> 0.
    """
    num_states = log_transitions.shape[0]
    stay = np.diag(log_transitions).copy()
    advance = np.empty(num_states)
    idx = np.arange(num_states - 1)
    advance[:-1] = log_transitions[idx, idx + 1]
    advance[-1] = log_transitions[num_states - 1, 0]
    return stay, advance


def decode_transitions(model: GaussianHmm, grammar: DecodeGrammar) -> np.ndarray:
    """
    Transition matrix the decoder uses for a grammar.

    SINGLE_PASS removes the wrap edge. MULTI_STEP on a cyclic model uses the
    trained wrap edge; on a linear model a loop edge is added with probability
    rho = mean forward-transition probability; the last self-loop is left as
    trained (that row then sums above one).
    """
    log_trans = model.log_transitions.copy()
    last = model.num_states - 1
    if grammar is DecodeGrammar.SINGLE_PASS:
        log_trans[last, 0] = -np.inf
        return log_trans
    if model.cyclic:
        return log_trans
    idx = np.arange(last)
    rho = float(np.mean(np.exp(model.log_transitions[idx, idx + 1])))
    log_trans[last, 0] = np.log(rho)
    return log_trans


def count_steps(state_path: np.ndarray, num_states: int) -> Tuple[int, Tuple[int, ...]]:
    """Step count is one plus the number of wrap-edge traversals in the path."""
    path = np.asarray(state_path)
    if path.size < 2:
        return 1, ()
    wraps = np.flatnonzero((path[:-1] == num_states - 1) & (path[1:] == 0)) + 1
    return 1 + int(wraps.size), tuple(int(t) for t in wraps)
