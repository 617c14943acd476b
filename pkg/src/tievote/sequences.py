"""Labeled example sequences and the small algebra used throughout the package.

A :class:`LabeledSequence` is an ordered multiset of ``(point, label)``
examples. Points live either on the real line (scalar domain) or in a finite
indexed domain; labels are the two-valued :class:`Label` enumeration. The
three sequence operators every other module builds on are

* ``subsequence(i, j)`` -- contiguous 1-indexed inclusive slice,
* ``concat(other)``     -- order-preserving concatenation,
* ``filter(pred)``      -- longest subsequence whose elements satisfy ``pred``.

All objects are immutable after construction and safe to share across
threads. Points compare by exact equality (bit-equal scalars or equal
indices); there is no tolerance-based comparison anywhere.
"""

from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass
from typing import Callable, Iterator, Union

import numpy as np

__all__ = [
    "Label",
    "ScalarDomain",
    "FiniteDomain",
    "Domain",
    "LabeledSequence",
    "StructuralError",
    "PreconditionError",
]


class StructuralError(ValueError):
    """A value violates a structural contract (domain mismatch, bad shape)."""


class PreconditionError(ValueError):
    """An operation was called outside its stated precondition."""


class Label(enum.Enum):
    """Binary class label. Storage uses the int8 codes -1/+1; arithmetic on
    the codes happens only at the voting boundary (sign of weighted sums)."""

    MINUS = -1
    PLUS = 1

    @property
    def code(self) -> int:
        return self.value

    @staticmethod
    def from_code(code: int) -> "Label":
        if code == 1:
            return Label.PLUS
        if code == -1:
            return Label.MINUS
        raise StructuralError(f"label code must be -1 or 1, got {code!r}")

    def flipped(self) -> "Label":
        return Label.MINUS if self is Label.PLUS else Label.PLUS


@dataclass(frozen=True)
class ScalarDomain:
    """Points are finite real scalars."""

    def validate_points(self, points: np.ndarray) -> None:
        if not np.issubdtype(points.dtype, np.floating):
            raise StructuralError("scalar-domain points must be floats")
        if not np.all(np.isfinite(points)):
            raise StructuralError("scalar points must be finite (no NaN/inf)")


@dataclass(frozen=True)
class FiniteDomain:
    """Points are integer indices into a finite domain of ``size`` elements."""

    size: int

    def __post_init__(self) -> None:
        if self.size < 1:
            raise StructuralError("finite domain size must be >= 1")

    def validate_points(self, points: np.ndarray) -> None:
        if not np.issubdtype(points.dtype, np.integer):
            raise StructuralError("finite-domain points must be integers")
        if points.size and (points.min() < 0 or points.max() >= self.size):
            raise StructuralError(
                f"finite-domain indices must lie in [0, {self.size})"
            )


Domain = Union[ScalarDomain, FiniteDomain]

_POINT_DTYPE = {ScalarDomain: np.float64, FiniteDomain: np.int64}


class LabeledSequence:
    """Immutable ordered multiset of labeled examples over one domain.

    Parameters
    ----------
    points : array-like
        Point values; floats for a scalar domain, indices for a finite one.
    labels : array-like
        Label codes in {-1, +1} (or :class:`Label` members).
    domain : Domain
        Domain the points live in.

    Notes
    -----
    ``subsequence`` follows the 1-indexed inclusive slicing convention used
    by the sequence algebra; plain ``seq[i]`` integer indexing is 0-based and
    returns a ``(point, Label)`` pair. Slice syntax is deliberately not
    supported so the two conventions cannot be confused.
    """

    __slots__ = ("_points", "_labels", "_domain")

    def __init__(self, points, labels, domain: Domain) -> None:
        pts = np.asarray(points)
        if pts.size and isinstance(domain, FiniteDomain) and not np.issubdtype(pts.dtype, np.integer):
            raise StructuralError("finite-domain points must be integers")
        pts = pts.astype(_POINT_DTYPE[type(domain)])
        labs = np.asarray(
            [lab.code if isinstance(lab, Label) else lab for lab in labels]
            if not isinstance(labels, np.ndarray)
            else labels,
            dtype=np.int8,
        )
        if pts.ndim != 1 or labs.ndim != 1:
            raise StructuralError("points and labels must be 1-d")
        if pts.shape[0] != labs.shape[0]:
            raise StructuralError("points and labels must have equal length")
        if labs.size and not np.all(np.abs(labs) == 1):
            raise StructuralError("labels must be -1 or +1")
        domain.validate_points(pts)
        pts.setflags(write=False)
        labs.setflags(write=False)
        object.__setattr__(self, "_points", pts)
        object.__setattr__(self, "_labels", labs)
        object.__setattr__(self, "_domain", domain)

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("LabeledSequence is immutable")

    @staticmethod
    def empty(domain: Domain) -> "LabeledSequence":
        return LabeledSequence(
            np.empty(0, dtype=_POINT_DTYPE[type(domain)]),
            np.empty(0, dtype=np.int8),
            domain,
        )

    @staticmethod
    def _from_validated(points: np.ndarray, labels: np.ndarray, domain: Domain) -> "LabeledSequence":
        # Internal fast path: arrays already validated and read-only.
        seq = object.__new__(LabeledSequence)
        object.__setattr__(seq, "_points", points)
        object.__setattr__(seq, "_labels", labels)
        object.__setattr__(seq, "_domain", domain)
        return seq

    @property
    def points(self) -> np.ndarray:
        return self._points

    @property
    def label_codes(self) -> np.ndarray:
        return self._labels

    @property
    def domain(self) -> Domain:
        return self._domain

    def __len__(self) -> int:
        return int(self._points.shape[0])

    def __iter__(self) -> Iterator[tuple]:
        for p, code in zip(self._points.tolist(), self._labels.tolist()):
            yield (p, Label.from_code(code))

    def __getitem__(self, index: int) -> tuple:
        if not isinstance(index, (int, np.integer)):
            raise TypeError(
                "only 0-based integer indexing is supported; "
                "use subsequence(i, j) for 1-indexed inclusive ranges"
            )
        p = self._points[index]
        return (p.item(), Label.from_code(int(self._labels[index])))

    def __eq__(self, other) -> bool:
        if not isinstance(other, LabeledSequence):
            return NotImplemented
        return (
            self._domain == other._domain
            and np.array_equal(self._points, other._points)
            and np.array_equal(self._labels, other._labels)
        )

    def __hash__(self) -> int:
        return hash((self._domain, self._points.tobytes(), self._labels.tobytes()))

    def __repr__(self) -> str:
        return f"LabeledSequence(len={len(self)}, domain={self._domain!r})"

    # -- sequence algebra ---------------------------------------------------

    def subsequence(self, i: int, j: int) -> "LabeledSequence":
        """Contiguous subsequence from the i-th through the j-th entry,
        1-indexed and inclusive on both ends."""
        if not (1 <= i <= j <= len(self)):
            raise PreconditionError(
                f"need 1 <= i <= j <= {len(self)}, got i={i}, j={j}"
            )
        return LabeledSequence._from_validated(
            self._points[i - 1 : j], self._labels[i - 1 : j], self._domain
        )

    def concat(self, other: "LabeledSequence") -> "LabeledSequence":
        """Concatenation preserving the order of both operands."""
        if self._domain != other._domain:
            raise StructuralError(
                f"cannot concatenate sequences over {self._domain!r} and {other._domain!r}"
            )
        if len(self) == 0:
            return other
        if len(other) == 0:
            return self
        pts = np.concatenate([self._points, other._points])
        labs = np.concatenate([self._labels, other._labels])
        pts.setflags(write=False)
        labs.setflags(write=False)
        return LabeledSequence._from_validated(pts, labs, self._domain)

    def filter(self, predicate: Callable[[object, Label], bool]) -> "LabeledSequence":
        """Longest subsequence whose elements all satisfy ``predicate``.

        Duplicates are preserved: the result keeps every occurrence, in the
        original order (multiset semantics).
        """
        keep = np.fromiter(
            (bool(predicate(p, lab)) for p, lab in self),
            dtype=bool,
            count=len(self),
        )
        return self.take(np.flatnonzero(keep))

    def take(self, indices: np.ndarray) -> "LabeledSequence":
        """Subsequence at the given 0-based positions, in the given order."""
        pts = self._points[indices]
        labs = self._labels[indices]
        pts.setflags(write=False)
        labs.setflags(write=False)
        return LabeledSequence._from_validated(pts, labs, self._domain)

    def is_submultiset_of(self, other: "LabeledSequence") -> bool:
        """Frequency-counting containment: every example of ``self`` occurs in
        ``other`` at least as often."""
        if self._domain != other._domain:
            return False
        mine = _pair_counts(self)
        theirs = _pair_counts(other)
        return all(theirs.get(key, 0) >= n for key, n in mine.items())

    # -- serialization ------------------------------------------------------

    def to_csv(self) -> str:
        """CSV text with header ``point,label``; labels are -1/1, finite-domain
        points serialize as integer indices."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["point", "label"])
        finite = isinstance(self._domain, FiniteDomain)
        for p, code in zip(self._points.tolist(), self._labels.tolist()):
            writer.writerow([int(p) if finite else repr(float(p)), code])
        return buf.getvalue()

    @staticmethod
    def from_csv(text: str, domain: Domain) -> "LabeledSequence":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or rows[0] != ["point", "label"]:
            raise StructuralError("expected CSV header 'point,label'")
        finite = isinstance(domain, FiniteDomain)
        points = [int(r[0]) if finite else float(r[0]) for r in rows[1:]]
        labels = [int(r[1]) for r in rows[1:]]
        return LabeledSequence(points, labels, domain)


def _pair_counts(seq: LabeledSequence) -> dict:
    pairs, counts = np.unique(
        np.stack([seq.points.view(np.int64) if seq.points.dtype == np.float64
                  else seq.points.astype(np.int64),
                  seq.label_codes.astype(np.int64)], axis=1),
        axis=0,
        return_counts=True,
    ) if len(seq) else (np.empty((0, 2), dtype=np.int64), np.empty(0, dtype=np.int64))
    return {tuple(row): int(n) for row, n in zip(pairs.tolist(), counts.tolist())}
