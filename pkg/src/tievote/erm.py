"""Exact empirical-risk minimization over the concrete hypothesis classes.

Each oracle returns a hypothesis attaining the exact minimum number of
training errors, with a documented total order breaking ties:

* finite class: lowest hypothesis index,
* thresholds: orientation +1 preferred, then smallest cut (cuts are placed at
  midpoints of consecutive distinct values, with -inf/+inf sentinels),
* intervals: lexicographically smallest endpoint pair over the candidate
  boundaries (midpoints and -inf/+inf sentinels).

``tie="worst"`` selects the maximum of the same total order instead, which
emulates an adversarial ERM (it errs on every point the sample leaves
unconstrained whenever the class allows it).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .hypotheses import (
    FiniteClass,
    Hypothesis,
    HypothesisClass,
    IntervalClass,
    IntervalHypothesis,
    ThresholdClass,
    ThresholdHypothesis,
)
from .sequences import LabeledSequence, PreconditionError, StructuralError

__all__ = ["ErmResult", "erm", "empirical_error", "empirical_error_count"]

TIE_MODES = ("first", "worst")


@dataclass(frozen=True)
class ErmResult:
    """Outcome of one oracle call.

    ``empirical_errors`` is the exact minimum error count on the training
    sequence; ``ties_broken`` counts how many equally optimal candidates the
    tie rule had to choose among (0 when the optimum was unique).
    """

    hypothesis: Hypothesis
    empirical_errors: int
    ties_broken: int


def erm(hclass: HypothesisClass, S: LabeledSequence, tie: str = "first") -> ErmResult:
    """Exact empirical risk minimizer for ``hclass`` on ``S``."""
    if len(S) == 0:
        raise PreconditionError("ERM needs a nonempty training sequence")
    if tie not in TIE_MODES:
        raise StructuralError(f"tie must be one of {TIE_MODES}, got {tie!r}")
    hclass.domain.validate_points(S.points)
    if isinstance(hclass, FiniteClass):
        return _erm_finite(hclass, S, tie)
    if isinstance(hclass, ThresholdClass):
        return _erm_threshold(hclass, S, tie)
    if isinstance(hclass, IntervalClass):
        return _erm_interval(hclass, S, tie)
    raise StructuralError(f"unknown hypothesis class {type(hclass)!r}")


def empirical_error_count(h: Hypothesis, S: LabeledSequence) -> int:
    """Number of training examples ``h`` mislabels."""
    if len(S) == 0:
        return 0
    return int(np.count_nonzero(h.predict(S.points) != S.label_codes))


def empirical_error(h: Hypothesis, S: LabeledSequence) -> Fraction:
    """Exact empirical error rate of ``h`` on ``S``."""
    if len(S) == 0:
        raise PreconditionError("empirical error of an empty sequence is undefined")
    return Fraction(empirical_error_count(h, S), len(S))


# ---------------------------------------------------------------------------
# finite class


def _erm_finite(hclass: FiniteClass, S: LabeledSequence, tie: str) -> ErmResult:
    size = hclass.domain.size
    pts = S.points
    cnt_plus = np.bincount(pts[S.label_codes == 1], minlength=size).astype(np.int64)
    cnt_minus = np.bincount(pts[S.label_codes == -1], minlength=size).astype(np.int64)
    mat = hclass.labels_matrix
    errors = (mat == 1) @ cnt_minus + (mat == -1) @ cnt_plus
    best = int(errors.min())
    optima = np.flatnonzero(errors == best)
    index = int(optima[0] if tie == "first" else optima[-1])
    return ErmResult(hclass.hypothesis(index), best, int(optima.size - 1))


# ---------------------------------------------------------------------------
# thresholds


def _threshold_cuts(values: np.ndarray) -> np.ndarray:
    """Candidate cuts: -inf, midpoints of consecutive distinct values, +inf."""
    mids = (values[:-1] + values[1:]) / 2.0
    return np.concatenate([[-np.inf], mids, [np.inf]])


def _erm_threshold(hclass: ThresholdClass, S: LabeledSequence, tie: str) -> ErmResult:
    values, inverse = np.unique(S.points, return_inverse=True)
    k = values.size
    plus_at = np.bincount(inverse[S.label_codes == 1], minlength=k).astype(np.int64)
    minus_at = np.bincount(inverse[S.label_codes == -1], minlength=k).astype(np.int64)
    plus_prefix = np.concatenate([[0], np.cumsum(plus_at)])
    minus_prefix = np.concatenate([[0], np.cumsum(minus_at)])
    plus_total = int(plus_prefix[-1])
    minus_total = int(minus_prefix[-1])

    # predictions: x > theta gets +orientation, else -orientation
    err_plus = plus_prefix + (minus_total - minus_prefix)
    err_minus = minus_prefix + (plus_total - plus_prefix)
    cuts = _threshold_cuts(values)

    candidates = [(1, err_plus)]
    if hclass.both_orientations:
        candidates.append((-1, err_minus))

    best = min(int(err.min()) for _, err in candidates)
    n_ties = sum(int(np.count_nonzero(err == best)) for _, err in candidates)
    if tie == "first":
        for orientation, err in candidates:  # orientation +1 first
            if int(err.min()) == best:
                q = int(np.argmin(err))
                return ErmResult(
                    ThresholdHypothesis(float(cuts[q]), orientation), best, n_ties - 1
                )
    for orientation, err in reversed(candidates):  # worst: -1 first, largest cut
        if int(err.min()) == best:
            q = int(err.size - 1 - np.argmin(err[::-1]))
            return ErmResult(
                ThresholdHypothesis(float(cuts[q]), orientation), best, n_ties - 1
            )
    raise AssertionError("unreachable")


# ---------------------------------------------------------------------------
# intervals


def _erm_interval(hclass: IntervalClass, S: LabeledSequence, tie: str) -> ErmResult:
    values, inverse = np.unique(S.points, return_inverse=True)
    k = values.size
    plus_at = np.bincount(inverse[S.label_codes == 1], minlength=k).astype(np.int64)
    minus_at = np.bincount(inverse[S.label_codes == -1], minlength=k).astype(np.int64)
    plus_total = int(plus_at.sum())
    gain = np.concatenate([[0], np.cumsum(plus_at - minus_at)])  # gain[q], q = 0..k
    cuts = _threshold_cuts(values)  # boundary values, index 0..k

    # interval [cuts[i], cuts[j]] with i <= j covers value runs i+1..j and
    # makes plus_total - (gain[j] - gain[i]) errors; maximize the gain term.
    if tie == "first":
        # suffix maxima of gain with the smallest attaining j
        best_j = np.empty(k + 1, dtype=np.int64)
        best_j[k] = k
        for q in range(k - 1, -1, -1):
            nxt = best_j[q + 1]
            best_j[q] = q if gain[q] >= gain[nxt] else nxt
        per_i = gain[best_j] - gain  # best gain starting at each i
        max_gain = int(per_i.max())
        i = int(np.argmax(per_i == max_gain))
        j = int(best_j[i])
    else:
        # worst: lexicographically largest (i, j); suffix maxima keeping the
        # largest attaining j, then the largest optimal i
        best_j = np.empty(k + 1, dtype=np.int64)
        best_j[k] = k
        for q in range(k - 1, -1, -1):
            nxt = best_j[q + 1]
            best_j[q] = q if gain[q] > gain[nxt] else nxt
        per_i = gain[best_j] - gain
        max_gain = int(per_i.max())
        i = int(k - np.argmax((per_i == max_gain)[::-1]))
        j = int(best_j[i])
    best = plus_total - max_gain
    n_ties = _count_optimal_pairs(np.asarray(gain), max_gain)
    return ErmResult(
        IntervalHypothesis(float(cuts[i]), float(cuts[j])), int(best), n_ties - 1
    )


def _count_optimal_pairs(gain: np.ndarray, max_gain: int) -> int:
    """Number of boundary pairs (i <= j) attaining the maximum gain."""
    suffix_best = np.maximum.accumulate(gain[::-1])[::-1]
    total = 0
    counts = {}
    for q in range(gain.size - 1, -1, -1):
        counts[gain[q]] = counts.get(gain[q], 0) + 1
        target = gain[q] + max_gain
        if target <= suffix_best[q]:
            total += counts.get(target, 0)
    return total
