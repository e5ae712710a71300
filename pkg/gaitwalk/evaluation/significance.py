"""
Paired one-tailed t-test on per-recording correctness.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import stats

from ..core.errors import InsufficientData, MismatchedRecordingSets
from ..models.reports import EvaluationReport

logger = logging.getLogger(__name__)


def _indicators(report: EvaluationReport, condition: Optional[str]) -> dict:
    return {
        o.key: float(o.correct)
        for o in report.per_recording
        if condition is None or o.condition == condition
    }


def paired_differences(
    a: EvaluationReport, b: EvaluationReport, condition: Optional[str]
) -> np.ndarray:
    """b-minus-a correctness differences over the shared recording list."""
    left = _indicators(a, condition)
    right = _indicators(b, condition)
    if set(left) != set(right):
        raise MismatchedRecordingSets(
            "reports cover different recordings",
            {"condition": condition or "all", "only_a": len(set(left) - set(right)),
             "only_b": len(set(right) - set(left))},
        )
    keys = sorted(left)
    return np.array([right[k] - left[k] for k in keys], dtype=np.float64)


@dataclass(frozen=True)
class PairedTTest:
    statistic: float  # +inf / -inf / nan when the differences have no spread
    dof: int
    p_value: float


def paired_t_test(
    a: EvaluationReport, b: EvaluationReport, condition: Optional[str] = None
) -> PairedTTest:
    """
    Test "b is more accurate than a" on paired correctness indicators.

    Args:
        a: reference system report
        b: candidate system report
        condition: "N", "B", "S", or None to pool every recording

    Returns:
        t statistic, degrees of freedom and one-tailed p-value; a
        zero-variance difference vector gives p = 0.5 when the mean difference
        is zero, otherwise 0.0 (b better) or 1.0
    """
    diffs = paired_differences(a, b, condition)
    if diffs.size < 2:
        raise InsufficientData(
            f"a paired t-test needs at least 2 recordings, got {diffs.size}",
            {"condition": condition or "all"},
        )
    dof = int(diffs.size - 1)
    mean = float(diffs.mean())
    if float(diffs.std(ddof=1)) == 0.0:
        if mean == 0.0:
            return PairedTTest(statistic=float("nan"), dof=dof, p_value=0.5)
        if mean > 0:
            return PairedTTest(statistic=float("inf"), dof=dof, p_value=0.0)
        return PairedTTest(statistic=float("-inf"), dof=dof, p_value=1.0)

    # ttest_rel(b, a) works on b - a, the same differences as above
    result = stats.ttest_rel(diffs, np.zeros_like(diffs), alternative="greater")
    logger.debug(
        f"paired t-test ({condition or 'all'}): t={result.statistic:.4f} p={result.pvalue:.4g}"
    )
    return PairedTTest(statistic=float(result.statistic), dof=dof, p_value=float(result.pvalue))


def significance_test(
    a: EvaluationReport, b: EvaluationReport, condition: Optional[str] = None
) -> float:
    """One-tailed p-value that b beats a on the given condition."""
    return paired_t_test(a, b, condition).p_value
