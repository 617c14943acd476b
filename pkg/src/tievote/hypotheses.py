"""Concrete low-VC hypothesis classes and their hypotheses.

Three class kinds are supported:

* :class:`FiniteClass` -- an explicit label matrix over a finite domain,
* :class:`ThresholdClass` -- 1-d threshold rules, optionally both orientations,
* :class:`IntervalClass` -- +1 inside a closed interval, -1 outside.

Every hypothesis evaluates whole point arrays at once (``predict``) and
single points (``predict_point``). Hypotheses compare by value, which is what
makes determinism of the ERM oracles testable.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .sequences import (
    Domain,
    FiniteDomain,
    Label,
    ScalarDomain,
    StructuralError,
)

__all__ = [
    "FiniteClass",
    "ThresholdClass",
    "IntervalClass",
    "HypothesisClass",
    "FiniteHypothesis",
    "ThresholdHypothesis",
    "IntervalHypothesis",
    "Hypothesis",
    "MAX_FINITE_DOMAIN",
    "MAX_FINITE_HYPOTHESES",
]

MAX_FINITE_DOMAIN = 4096
MAX_FINITE_HYPOTHESES = 65536


# ---------------------------------------------------------------------------
# hypotheses


@dataclass(frozen=True)
class FiniteHypothesis:
    """Row ``index`` of a finite class's label matrix."""

    index: int
    labels: np.ndarray = field(compare=False, repr=False)

    def predict(self, points: np.ndarray) -> np.ndarray:
        return self.labels[points]

    def predict_point(self, x) -> Label:
        return Label.from_code(int(self.labels[int(x)]))


@dataclass(frozen=True)
class ThresholdHypothesis:
    """``+orientation`` strictly right of ``theta``, ``-orientation`` otherwise.

    ``theta`` may be ``-inf`` (constant ``+orientation``) or ``+inf``
    (constant ``-orientation``).
    """

    theta: float
    orientation: int

    def predict(self, points: np.ndarray) -> np.ndarray:
        out = np.where(points > self.theta, self.orientation, -self.orientation)
        return out.astype(np.int8)

    def predict_point(self, x) -> Label:
        return Label.from_code(self.orientation if x > self.theta else -self.orientation)


@dataclass(frozen=True)
class IntervalHypothesis:
    """+1 on the closed interval ``[low, high]``, -1 outside."""

    low: float
    high: float

    def predict(self, points: np.ndarray) -> np.ndarray:
        inside = (points >= self.low) & (points <= self.high)
        return np.where(inside, 1, -1).astype(np.int8)

    def predict_point(self, x) -> Label:
        return Label.PLUS if self.low <= x <= self.high else Label.MINUS


Hypothesis = Union[FiniteHypothesis, ThresholdHypothesis, IntervalHypothesis]


# ---------------------------------------------------------------------------
# classes


class FiniteClass:
    """Explicitly enumerated class over a finite domain.

    Parameters
    ----------
    labels_matrix : array-like of shape (n_hypotheses, domain_size)
        Entry ``(h, x)`` is the label (+1/-1) hypothesis ``h`` assigns to
        domain point ``x``.
    vc_dim : int, optional
        VC dimension. Computed exactly when the domain is small enough to
        enumerate subsets; required otherwise. A supplied value is validated
        against the exact computation on small domains and against the
        ``log2`` counting bound always.
    """

    def __init__(self, labels_matrix, vc_dim: int | None = None) -> None:
        mat = np.asarray(labels_matrix, dtype=np.int8)
        if mat.ndim != 2:
            raise StructuralError("labels_matrix must be 2-d")
        if not np.all(np.abs(mat) == 1):
            raise StructuralError("labels_matrix entries must be -1 or +1")
        n_hyp, n_dom = mat.shape
        if n_dom < 1 or n_dom > MAX_FINITE_DOMAIN:
            raise StructuralError(f"domain size must be in [1, {MAX_FINITE_DOMAIN}]")
        if n_hyp < 1 or n_hyp > MAX_FINITE_HYPOTHESES:
            raise StructuralError(f"class size must be in [1, {MAX_FINITE_HYPOTHESES}]")
        mat.setflags(write=False)
        self.labels_matrix = mat
        self.domain = FiniteDomain(n_dom)
        log2_bound = int(math.floor(math.log2(n_hyp))) if n_hyp > 1 else 0
        exact = self._exact_vc_dim() if n_dom <= 16 else None
        if vc_dim is None:
            if exact is None:
                raise StructuralError(
                    "vc_dim must be supplied for domains larger than 16 points"
                )
            vc_dim = exact
        else:
            if vc_dim > log2_bound:
                raise StructuralError(
                    f"vc_dim {vc_dim} exceeds log2 bound {log2_bound} for {n_hyp} hypotheses"
                )
            if exact is not None and vc_dim != exact:
                raise StructuralError(
                    f"supplied vc_dim {vc_dim} != exact shattering dimension {exact}"
                )
        self.vc_dim = int(vc_dim)

    def _exact_vc_dim(self) -> int:
        n_hyp, n_dom = self.labels_matrix.shape
        best = 0
        max_size = min(n_dom, int(math.log2(n_hyp)) if n_hyp > 1 else 0)
        for size in range(1, max_size + 1):
            shattered = False
            for subset in itertools.combinations(range(n_dom), size):
                patterns = np.unique(self.labels_matrix[:, subset], axis=0)
                if patterns.shape[0] == 2 ** size:
                    shattered = True
                    break
            if shattered:
                best = size
            else:
                break
        return best

    def __len__(self) -> int:
        return int(self.labels_matrix.shape[0])

    def hypothesis(self, index: int) -> FiniteHypothesis:
        return FiniteHypothesis(index=int(index), labels=self.labels_matrix[index])

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FiniteClass)
            and np.array_equal(self.labels_matrix, other.labels_matrix)
            and self.vc_dim == other.vc_dim
        )

    def __repr__(self) -> str:
        return f"FiniteClass(n_hypotheses={len(self)}, domain_size={self.domain.size})"

    @staticmethod
    def from_csv(text: str, vc_dim: int | None = None) -> "FiniteClass":
        """Load from CSV: rows = hypotheses, columns = domain points, entries -1/1."""
        rows = [[int(v) for v in row] for row in csv.reader(io.StringIO(text)) if row]
        return FiniteClass(rows, vc_dim=vc_dim)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        for row in self.labels_matrix.tolist():
            writer.writerow(row)
        return buf.getvalue()


@dataclass(frozen=True)
class ThresholdClass:
    """1-d thresholds; ``both_orientations=False`` fixes orientation +1."""

    both_orientations: bool = True

    @property
    def domain(self) -> ScalarDomain:
        return ScalarDomain()

    @property
    def vc_dim(self) -> int:
        return 2 if self.both_orientations else 1

    def hypothesis(self, theta: float, orientation: int = 1) -> ThresholdHypothesis:
        if orientation not in (-1, 1):
            raise StructuralError("orientation must be -1 or +1")
        if orientation == -1 and not self.both_orientations:
            raise StructuralError("this class is orientation-fixed to +1")
        return ThresholdHypothesis(theta=float(theta), orientation=orientation)


@dataclass(frozen=True)
class IntervalClass:
    """Closed intervals on the line labeling +1 inside, -1 outside."""

    @property
    def domain(self) -> ScalarDomain:
        return ScalarDomain()

    @property
    def vc_dim(self) -> int:
        return 2

    def hypothesis(self, low: float, high: float) -> IntervalHypothesis:
        if not low <= high:
            raise StructuralError("interval needs low <= high")
        return IntervalHypothesis(low=float(low), high=float(high))


HypothesisClass = Union[FiniteClass, ThresholdClass, IntervalClass]


def check_points_compatible(hclass: HypothesisClass, points: np.ndarray) -> None:
    """Raise ``StructuralError`` when points do not live in the class domain."""
    hclass.domain.validate_points(np.asarray(points))


def hypothesis_params(h: Hypothesis) -> dict:
    """Kind-tagged parameter dict used by the CSV/JSON exporters."""
    if isinstance(h, FiniteHypothesis):
        return {"kind": "finite", "index": h.index}
    if isinstance(h, ThresholdHypothesis):
        return {"kind": "threshold", "theta": h.theta, "orientation": h.orientation}
    if isinstance(h, IntervalHypothesis):
        return {"kind": "interval", "low": h.low, "high": h.high}
    raise StructuralError(f"unknown hypothesis type {type(h)!r}")
