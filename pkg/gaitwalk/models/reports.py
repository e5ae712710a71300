"""
Evaluation report documents.
"""

from fractions import Fraction
from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

CONDITIONS = ("N", "B", "S")


class RecordingOutcome(BaseModel):
    """Decision for one identification recording."""

    model_config = ConfigDict(extra="forbid")

    subject_id: str
    condition: Literal["N", "B", "S"]
    take: int
    path: str
    predicted: str
    correct: bool
    log_likelihood: float
    detected_steps: int
    true_steps: Optional[int] = None

    @property
    def key(self) -> tuple:
        return (self.subject_id, self.condition, self.take, self.path)


class StepStatistics(BaseModel):
    """Step-count analysis over the N condition."""

    model_config = ConfigDict(extra="forbid")

    recordings: int = 0
    mean_true_steps: Optional[float] = None
    mean_detected_steps: Optional[float] = None
    mean_detected_correct: Optional[float] = None  # correctly identified subjects only
    mean_detected_incorrect: Optional[float] = None
    mean_abs_error_correct: Optional[float] = None


class SystemDescription(BaseModel):
    model_config = ConfigDict(extra="forbid")

    grammar: Literal["single", "multi"]
    topology: Literal["linear", "cyclic"]
    use_pca: bool
    num_states: int
    training_iterations: int


class EvaluationReport(BaseModel):
    """Per-condition identification accuracy; `average` is the mean of the conditions."""

    model_config = ConfigDict(extra="forbid")

    version: Literal[1] = 1
    split: Literal["development", "test"] = "development"
    system: Optional[SystemDescription] = None
    per_condition_accuracy: Dict[str, Optional[float]]
    average: Optional[float]
    counts: Dict[str, int]
    correct: Dict[str, int]
    per_recording: List[RecordingOutcome] = Field(default_factory=list)
    step_statistics: StepStatistics = Field(default_factory=StepStatistics)

    @classmethod
    def from_outcomes(
        cls,
        outcomes: List[RecordingOutcome],
        split: Literal["development", "test"] = "development",
        system: Optional[SystemDescription] = None,
    ) -> "EvaluationReport":
        """Aggregate per-recording outcomes; averages come from exact fractions."""
        counts = {c: 0 for c in CONDITIONS}
        correct = {c: 0 for c in CONDITIONS}
        for outcome in outcomes:
            counts[outcome.condition] += 1
            correct[outcome.condition] += int(outcome.correct)

        fractions = {
            c: Fraction(correct[c], counts[c]) for c in CONDITIONS if counts[c] > 0
        }
        accuracy: Dict[str, Optional[float]] = {
            c: float(fractions[c]) if c in fractions else None for c in CONDITIONS
        }
        average = (
            float(sum(fractions.values(), Fraction(0)) / len(fractions)) if fractions else None
        )
        return cls(
            split=split,
            system=system,
            per_condition_accuracy=accuracy,
            average=average,
            counts=counts,
            correct=correct,
            per_recording=list(outcomes),
            step_statistics=step_statistics(outcomes),
        )


def _mean(values: List[float]) -> Optional[float]:
    return float(sum(values) / len(values)) if values else None


def step_statistics(outcomes: List[RecordingOutcome]) -> StepStatistics:
    normal = [o for o in outcomes if o.condition == "N"]
    with_truth = [o for o in normal if o.true_steps is not None]
    right = [o for o in normal if o.correct]
    wrong = [o for o in normal if not o.correct]
    return StepStatistics(
        recordings=len(normal),
        mean_true_steps=_mean([float(o.true_steps) for o in with_truth]),  # type: ignore[arg-type]
        mean_detected_steps=_mean([float(o.detected_steps) for o in normal]),
        mean_detected_correct=_mean([float(o.detected_steps) for o in right]),
        mean_detected_incorrect=_mean([float(o.detected_steps) for o in wrong]),
        mean_abs_error_correct=_mean(
            [abs(o.detected_steps - o.true_steps) for o in right if o.true_steps is not None]
        ),
    )
