from fractions import Fraction

import numpy as np
import pytest

from tievote.sequences import FiniteDomain, LabeledSequence, StructuralError
from tievote.splitting import (
    THREE_WAY,
    TWENTY_SEVEN_WAY,
    SplitParams,
    exact_log3,
    leaf_count,
    s_cap,
    split,
)

DOM = FiniteDomain(1 << 20)


def make_seq(n, offset=0):
    pts = np.arange(offset, offset + n, dtype=np.int64)
    return LabeledSequence(pts, np.ones(n, dtype=np.int8), DOM)


EMPTY = LabeledSequence.empty(DOM)


def recursion_leaf_count(k, params):
    # structural mirror of the recursion, independent of the closed form
    if k < params.min_exp:
        return 1
    return params.branch_count * recursion_leaf_count(k - params.active_exp_drop, params)


def test_alg2_one_level_shape():
    fam = split(make_seq(3 ** 6), EMPTY, TWENTY_SEVEN_WAY)
    assert len(fam) == 27
    # leaf = 3^0 active + (3^3 - 3^0) history
    assert all(len(leaf) == 27 for leaf in fam.leaves)


def test_base_case_single_leaf():
    T = make_seq(2, offset=10 ** 6)
    S = make_seq(3 ** 5)
    fam = split(S, T, TWENTY_SEVEN_WAY)
    assert len(fam) == 1
    assert fam.leaf(0) == S.concat(T)


def test_alg2_leaf_count_two_levels():
    assert leaf_count(3 ** 12, TWENTY_SEVEN_WAY) == 729
    fam = split(make_seq(3 ** 12), EMPTY, TWENTY_SEVEN_WAY)
    assert len(fam) == 729


def test_alg1_one_level_shape():
    fam = split(make_seq(3 ** 6), EMPTY, THREE_WAY)
    assert len(fam) == 3
    # each cell has 3^5 examples: 3^2 active + (3^5 - 3^2) history
    assert fam.leaf_size() == 3 ** 5
    diag = fam.diagnostics()
    assert diag.depth == 1 and diag.cell_sizes == (3 ** 5,)


def test_s_cap_values():
    assert s_cap(TWENTY_SEVEN_WAY) == Fraction(729, 26)
    assert s_cap(THREE_WAY) == Fraction(729, 234)
    cap = s_cap(TWENTY_SEVEN_WAY)
    assert cap.numerator > 0 and cap.denominator > 0
    assert np.gcd(cap.numerator, cap.denominator) == 1


def test_leaf_count_examples_and_recursion_agreement():
    assert leaf_count(3 ** 5, TWENTY_SEVEN_WAY) == 1
    assert leaf_count(3 ** 18, TWENTY_SEVEN_WAY) == 19683
    for params in (THREE_WAY, TWENTY_SEVEN_WAY):
        for k in range(0, 19):
            assert leaf_count(3 ** k, params) == recursion_leaf_count(k, params)
    # and against the real splitter while sequences stay small
    for params in (THREE_WAY, TWENTY_SEVEN_WAY):
        for k in range(0, 11):
            fam = split(make_seq(3 ** k), EMPTY, params)
            assert len(fam) == leaf_count(3 ** k, params)


def test_rejects_non_power_of_three():
    with pytest.raises(StructuralError):
        split(make_seq(100), EMPTY, TWENTY_SEVEN_WAY)
    with pytest.raises(StructuralError):
        leaf_count(100, TWENTY_SEVEN_WAY)
    with pytest.raises(StructuralError):
        exact_log3(0)


def test_rejects_domain_mismatch():
    S = make_seq(27)
    T = LabeledSequence([0], [1], FiniteDomain(7))
    with pytest.raises(StructuralError):
        split(S, T, TWENTY_SEVEN_WAY)


def test_partition_exactness_and_leaf_uniformity():
    for params in (THREE_WAY, TWENTY_SEVEN_WAY):
        S = make_seq(3 ** 7)
        T = make_seq(5, offset=10 ** 6)
        fam = split(S, T, params)
        sizes = {len(leaf) for leaf in fam.leaves}
        assert len(sizes) == 1
        base = S.concat(T)
        for i in range(len(fam)):
            # spans are in-bounds and pairwise disjoint: the leaf literally is
            # a sub-multiset of S concat T
            spans = fam.leaf_spans(i)
            assert all(0 <= lo < hi <= len(base) for lo, hi in spans)
            ordered = sorted(spans)
            assert all(a[1] <= b[0] for a, b in zip(ordered, ordered[1:]))
            assert fam.leaf(i).is_submultiset_of(base)


def test_leaf_paths_are_depth_first_branch_order():
    fam = split(make_seq(3 ** 12), EMPTY, TWENTY_SEVEN_WAY)
    paths = fam.leaf_paths
    assert paths[0] == (0, 0)
    assert paths[1] == (0, 1)
    assert paths[27] == (1, 0)
    assert paths[-1] == (26, 26)


def test_nesting_property():
    # the leaves of the branch-i child call appear as the contiguous block i
    S = make_seq(3 ** 12)
    T = make_seq(4, offset=10 ** 6)
    fam = split(S, T, TWENTY_SEVEN_WAY)
    cell = 3 ** 9
    block = len(fam) // 27
    for i in (0, 13, 26):
        cell_seq = S.subsequence(i * cell + 1, (i + 1) * cell)
        active = cell_seq.subsequence(1, 3 ** 6)
        hist = cell_seq.subsequence(3 ** 6 + 1, cell).concat(T)
        child = split(active, hist, TWENTY_SEVEN_WAY)
        assert len(child) == block
        for j in range(block):
            assert child.leaf(j) == fam.leaf(i * block + j)


def test_split_determinism():
    a = split(make_seq(3 ** 7), EMPTY, TWENTY_SEVEN_WAY)
    b = split(make_seq(3 ** 7), EMPTY, TWENTY_SEVEN_WAY)
    assert all(a.leaf(i) == b.leaf(i) for i in range(len(a)))


def test_params_validation():
    with pytest.raises(StructuralError):
        SplitParams(branch_count=4, active_exp_drop=6, history_exp_drop=3, min_exp=6)
    with pytest.raises(StructuralError):
        SplitParams(branch_count=27, active_exp_drop=3, history_exp_drop=3, min_exp=6)
    # min_exp is an explicit knob for small-scale tests of the recursion floor
    tiny = SplitParams(branch_count=3, active_exp_drop=2, history_exp_drop=1, min_exp=2)
    fam = split(make_seq(9), EMPTY, tiny)
    assert len(fam) == 3
