"""Recursive sample-splitting schemes.

Both schemes are instances of one parameterized recursion over an active
sequence ``S`` (length a power of 3) and a history ``T``:

* partition ``S`` into ``branch_count`` contiguous equal cells,
* inside cell ``i``, the leading ``3^(k - active_exp_drop)`` examples become
  the child's active set and the remainder of the cell joins the history,
* recurse until the active exponent falls below ``min_exp``, at which point
  the leaf training sequence is ``S ⊔ T``.

``THREE_WAY`` splits into 3 cells and recurses on a 1/27 sliver of each cell;
``TWENTY_SEVEN_WAY`` splits into 27 cells with the same 1/27 sliver. Leaves
are exposed as views assembled from contiguous spans of the base storage, so
a family with thousands of heavily overlapping leaves stays cheap.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List, Sequence, Tuple

import numpy as np

from .sequences import LabeledSequence, StructuralError

__all__ = [
    "SplitParams",
    "THREE_WAY",
    "TWENTY_SEVEN_WAY",
    "SplitFamily",
    "SplitDiagnostics",
    "split",
    "leaf_count",
    "s_cap",
    "exact_log3",
]


def exact_log3(m: int) -> int:
    """Return k with ``m == 3**k`` or raise ``StructuralError``."""
    if m < 1:
        raise StructuralError(f"sequence length must be a positive power of 3, got {m}")
    k = 0
    n = m
    while n % 3 == 0:
        n //= 3
        k += 1
    if n != 1:
        raise StructuralError(f"sequence length must be a power of 3, got {m}")
    return k


@dataclass(frozen=True)
class SplitParams:
    """Parameters of the splitting recursion.

    ``branch_count`` must equal ``3**history_exp_drop`` so the contiguous
    cells tile the active set exactly; ``active_exp_drop`` exceeds
    ``history_exp_drop`` so the child active set is a strict prefix of its
    cell. ``min_exp`` is the recursion floor on the active exponent.
    """

    branch_count: int
    active_exp_drop: int
    history_exp_drop: int
    min_exp: int

    def __post_init__(self) -> None:
        if self.history_exp_drop < 1:
            raise StructuralError("history_exp_drop must be >= 1")
        if self.branch_count != 3 ** self.history_exp_drop:
            raise StructuralError("branch_count must equal 3**history_exp_drop")
        if not self.active_exp_drop > self.history_exp_drop:
            raise StructuralError("active_exp_drop must exceed history_exp_drop")
        if self.min_exp < self.history_exp_drop:
            raise StructuralError("min_exp must be at least history_exp_drop")

    def depth(self, k: int) -> int:
        """Number of recursion levels applied to an active exponent ``k``."""
        if k < self.min_exp:
            return 0
        return (k - self.min_exp) // self.active_exp_drop + 1


THREE_WAY = SplitParams(branch_count=3, active_exp_drop=4, history_exp_drop=1, min_exp=6)
TWENTY_SEVEN_WAY = SplitParams(branch_count=27, active_exp_drop=6, history_exp_drop=3, min_exp=6)

PRESETS = {"ALG1": THREE_WAY, "ALG2": TWENTY_SEVEN_WAY}


@dataclass(frozen=True)
class SplitDiagnostics:
    """Shape of one split: recursion depth, leaf size and per-level cell sizes."""

    depth: int
    leaf_size: int
    cell_sizes: Tuple[int, ...]


class _LeafSequence(Sequence):
    """Lazy ordered view of the leaves; materializes one leaf per access."""

    def __init__(self, family: "SplitFamily") -> None:
        self._family = family

    def __len__(self) -> int:
        return len(self._family._spans)

    def __getitem__(self, index: int) -> LabeledSequence:
        return self._family.leaf(index)

    def __iter__(self) -> Iterator[LabeledSequence]:
        for i in range(len(self)):
            yield self._family.leaf(i)


class SplitFamily:
    """Ordered family of leaf training sequences produced by :func:`split`.

    Leaves share the concatenated base storage ``S ⊔ T``; each leaf is an
    ordered list of disjoint contiguous spans of that storage (active block
    first, then histories from deepest to shallowest, then the original
    history). ``leaves[i]`` materializes leaf ``i``; ``leaf_paths[i]`` is the
    branch index taken at each level on the way down.
    """

    def __init__(
        self,
        base: LabeledSequence,
        spans: List[Tuple[Tuple[int, int], ...]],
        paths: List[Tuple[int, ...]],
        params: SplitParams,
        input_sizes: Tuple[int, int],
    ) -> None:
        self._base = base
        self._spans = spans
        self._paths = paths
        self.params = params
        self.input_sizes = input_sizes

    @property
    def leaves(self) -> Sequence:
        return _LeafSequence(self)

    @property
    def leaf_paths(self) -> List[Tuple[int, ...]]:
        return list(self._paths)

    @property
    def base(self) -> LabeledSequence:
        return self._base

    def __len__(self) -> int:
        return len(self._spans)

    def leaf_spans(self, index: int) -> Tuple[Tuple[int, int], ...]:
        return self._spans[index]

    def leaf(self, index: int) -> LabeledSequence:
        spans = self._spans[index]
        if len(spans) == 1:
            lo, hi = spans[0]
            return self._base.subsequence(lo + 1, hi)
        pts = np.concatenate([self._base.points[lo:hi] for lo, hi in spans])
        labs = np.concatenate([self._base.label_codes[lo:hi] for lo, hi in spans])
        pts.setflags(write=False)
        labs.setflags(write=False)
        return LabeledSequence._from_validated(pts, labs, self._base.domain)

    def leaf_size(self) -> int:
        return sum(hi - lo for lo, hi in self._spans[0])

    def diagnostics(self) -> SplitDiagnostics:
        k = exact_log3(self.input_sizes[0])
        depth = self.params.depth(k)
        cells = []
        kk = k
        for _ in range(depth):
            cells.append(3 ** (kk - self.params.history_exp_drop))
            kk -= self.params.active_exp_drop
        return SplitDiagnostics(depth=depth, leaf_size=self.leaf_size(), cell_sizes=tuple(cells))


def split(S: LabeledSequence, T: LabeledSequence, params: SplitParams) -> SplitFamily:
    """Run the splitting recursion on active set ``S`` with history ``T``.

    ``|S|`` must be a power of 3 and both sequences must share a domain.
    Leaves come back in depth-first order with ascending branch index, so the
    family order is reproducible.
    """
    k = exact_log3(len(S)) if len(S) != 1 else 0
    if len(S) == 0:
        raise StructuralError("active sequence must be nonempty")
    if S.domain != T.domain:
        raise StructuralError("active and history sequences must share a domain")
    base = S.concat(T)
    m = len(S)
    t_span = (m, m + len(T)) if len(T) else None

    spans: List[Tuple[Tuple[int, int], ...]] = []
    paths: List[Tuple[int, ...]] = []

    def recurse(start: int, kk: int, hist: Tuple[Tuple[int, int], ...], path: Tuple[int, ...]) -> None:
        if kk < params.min_exp:
            leaf = ((start, start + 3 ** kk),) + hist
            if t_span is not None:
                leaf = leaf + (t_span,)
            spans.append(leaf)
            paths.append(path)
            return
        cell = 3 ** (kk - params.history_exp_drop)
        active = 3 ** (kk - params.active_exp_drop)
        for i in range(params.branch_count):
            cs = start + i * cell
            recurse(cs, kk - params.active_exp_drop, ((cs + active, cs + cell),) + hist, path + (i,))

    recurse(0, k, (), ())
    return SplitFamily(base, spans, paths, params, (m, len(T)))


def leaf_count(m: int, params: SplitParams) -> int:
    """Closed-form number of leaves produced by :func:`split` on ``|S| = m``."""
    k = exact_log3(m)
    return params.branch_count ** params.depth(k)


def s_cap(params: SplitParams) -> Fraction:
    """Exact ratio ``|S| / |S_{1,⊓}|`` of active-set size to first history cell."""
    # |S| = 3^k, |S_{1,⊓}| = 3^(k-h) - 3^(k-a); the k's cancel.
    a, h = params.active_exp_drop, params.history_exp_drop
    return Fraction(3 ** a, 3 ** (a - h) - 1)
