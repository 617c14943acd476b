"""Input validation helpers for the estimator API."""

from __future__ import annotations

import numpy as np

from .hypotheses import HypothesisClass
from .sequences import FiniteDomain, LabeledSequence, StructuralError

__all__ = ["check_X_y", "check_X", "sequence_from_arrays"]


def check_X(X, hclass: HypothesisClass) -> np.ndarray:
    """Coerce ``X`` to the 1-d point array the class domain expects.

    Accepts flat arrays or single-column 2-d arrays (the sklearn shape).
    """
    arr = np.asarray(X)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise StructuralError(f"X must be 1-d or a single column, got shape {arr.shape}")
    if isinstance(hclass.domain, FiniteDomain):
        if not np.issubdtype(arr.dtype, np.integer):
            rounded = np.rint(np.asarray(arr, dtype=np.float64))
            if not np.array_equal(rounded, np.asarray(arr, dtype=np.float64)):
                raise StructuralError("finite-domain points must be integers")
            arr = rounded.astype(np.int64)
        else:
            arr = arr.astype(np.int64)
    else:
        arr = arr.astype(np.float64)
    hclass.domain.validate_points(arr)
    return arr


def check_X_y(X, y, hclass: HypothesisClass):
    """Validate a training pair; labels must be -1/+1."""
    points = check_X(X, hclass)
    labels = np.asarray(y)
    if labels.ndim != 1:
        raise StructuralError("y must be 1-d")
    if labels.shape[0] != points.shape[0]:
        raise StructuralError("X and y length mismatch")
    labels = labels.astype(np.int8)
    if labels.size and not np.all(np.abs(labels) == 1):
        raise StructuralError("labels must be -1 or +1")
    return points, labels


def sequence_from_arrays(X, y, hclass: HypothesisClass) -> LabeledSequence:
    points, labels = check_X_y(X, y, hclass)
    return LabeledSequence(points, labels, hclass.domain)
