import numpy as np
import pytest

from tievote.sequences import (
    FiniteDomain,
    Label,
    LabeledSequence,
    PreconditionError,
    ScalarDomain,
    StructuralError,
)


def seq(points, labels, domain=None):
    return LabeledSequence(points, labels, domain or ScalarDomain())


def test_subsequence_is_one_indexed_inclusive():
    s = seq([1.0, 2.0, 3.0], [1, 1, 1])
    sub = s.subsequence(1, 2)
    assert sub.points.tolist() == [1.0, 2.0]
    assert len(s.subsequence(1, 1)) == 1

    s4 = seq([1.0, 2.0, 3.0, 4.0], [1, -1, 1, -1])
    assert s4.subsequence(2, 4).points.tolist() == [2.0, 3.0, 4.0]
    assert s4.subsequence(2, 4).label_codes.tolist() == [-1, 1, -1]


def test_subsequence_rejects_bad_ranges():
    s = seq([1.0, 2.0], [1, 1])
    for i, j in [(0, 1), (1, 3), (2, 1)]:
        with pytest.raises(PreconditionError):
            s.subsequence(i, j)


def test_concat_preserves_order_and_lengths():
    a = seq([1.0, 2.0], [1, -1])
    b = seq([3.0, 4.0], [-1, 1])
    c = a.concat(b)
    assert c.points.tolist() == [1.0, 2.0, 3.0, 4.0]
    assert c.subsequence(1, len(a)) == a
    empty = LabeledSequence.empty(ScalarDomain())
    assert a.concat(empty) == a
    assert empty.concat(empty) == empty


def test_split_then_concat_roundtrip():
    s = seq([float(i) for i in range(7)], [1, -1, 1, 1, -1, -1, 1])
    for i in range(1, len(s)):
        assert s.subsequence(1, i).concat(s.subsequence(i + 1, len(s))) == s


def test_filter_keeps_duplicates_in_order():
    s = seq([1.0, 2.0, 3.0], [1, -1, 1])
    only_plus = s.filter(lambda p, lab: lab is Label.PLUS)
    assert only_plus.points.tolist() == [1.0, 3.0]
    assert s.filter(lambda p, lab: True) == s

    dup = seq([1.0, 1.0, 2.0], [1, 1, -1])
    ones = dup.filter(lambda p, lab: p == 1.0)
    assert ones.points.tolist() == [1.0, 1.0]
    assert ones.is_submultiset_of(dup)


def test_containment_is_frequency_counting():
    s = seq([1.0, 1.0], [1, 1])
    bigger = seq([1.0, 1.0, 2.0], [1, 1, -1])
    smaller = seq([1.0], [1])
    assert s.is_submultiset_of(bigger)
    assert not bigger.is_submultiset_of(s)
    assert smaller.is_submultiset_of(s)


def test_finite_domain_validation():
    dom = FiniteDomain(3)
    LabeledSequence([0, 1, 2], [1, 1, 1], dom)
    with pytest.raises(StructuralError):
        LabeledSequence([0, 3], [1, 1], dom)
    with pytest.raises(StructuralError):
        LabeledSequence([0.5], [1], dom)


def test_scalar_points_must_be_finite():
    with pytest.raises(StructuralError):
        seq([np.nan], [1])
    with pytest.raises(StructuralError):
        seq([np.inf], [1])


def test_labels_two_valued():
    with pytest.raises(StructuralError):
        seq([1.0], [0])
    assert Label.from_code(1) is Label.PLUS
    assert Label.PLUS.flipped() is Label.MINUS
    with pytest.raises(StructuralError):
        Label.from_code(2)


def test_sequences_are_immutable():
    s = seq([1.0], [1])
    with pytest.raises(AttributeError):
        s.points = None
    with pytest.raises(ValueError):
        s.points[0] = 2.0


def test_indexing_returns_pairs_and_rejects_slices():
    s = seq([1.0, 2.0], [1, -1])
    assert s[0] == (1.0, Label.PLUS)
    assert s[1] == (2.0, Label.MINUS)
    with pytest.raises(TypeError):
        s[0:1]


def test_csv_roundtrip_scalar_and_finite():
    s = seq([1.5, -2.0], [1, -1])
    text = s.to_csv()
    assert text.splitlines()[0] == "point,label"
    assert LabeledSequence.from_csv(text, ScalarDomain()) == s

    dom = FiniteDomain(4)
    f = LabeledSequence([0, 3, 3], [1, -1, 1], dom)
    text = f.to_csv()
    assert "3,-1" in text
    assert LabeledSequence.from_csv(text, dom) == f

    with pytest.raises(StructuralError):
        LabeledSequence.from_csv("x,y\n1,1\n", ScalarDomain())
