import math
from fractions import Fraction

import numpy as np
import pytest

from tievote.ensemble import (
    ConfigError,
    MarginThresholds,
    VoterConfig,
    WeightedEnsemble,
    margin_loss,
    subsample_ensemble,
    train_full_ensemble,
    voter_count,
)
from tievote.erm import erm
from tievote.hypotheses import FiniteClass
from tievote.rng import SeedSpec
from tievote.sequences import FiniteDomain, Label, LabeledSequence
from tievote.splitting import TWENTY_SEVEN_WAY
from tievote.distributions import DistributionSpec

DOM = FiniteDomain(2)
ALWAYS = FiniteClass([[-1, -1], [1, 1]])  # h0 constant -1, h1 constant +1
H_MINUS = ALWAYS.hypothesis(0)
H_PLUS = ALWAYS.hypothesis(1)


def ens(*pairs):
    return WeightedEnsemble(tuple(pairs), leaf_indices=tuple(range(len(pairs))), seed=None, erm_calls=0)


def test_avg_neq_counting():
    e = ens((H_PLUS, 1), (H_PLUS, 1), (H_MINUS, 1))
    assert e.avg_neq(0, Label.PLUS) == Fraction(1, 3)
    assert e.avg_neq(0, Label.MINUS) == Fraction(2, 3)
    all_right = ens((H_PLUS, 1), (H_PLUS, 1))
    assert all_right.avg_neq(0, Label.PLUS) == 0


def test_avg_neq_weighted():
    e = ens((H_MINUS, 5), (H_PLUS, 7))
    # first member (weight 5) errs on label +1
    assert e.avg_neq(1, Label.PLUS) == Fraction(5, 12)
    assert e.avg_neq(1, Label.PLUS) + (1 - e.avg_neq(1, Label.PLUS)) == 1


def test_margin_vote_rational_threshold():
    e = ens((H_PLUS, 240), (H_MINUS, 3))
    assert e.margin_vote(0, Fraction(232, 243)) is Label.PLUS
    even = ens((H_PLUS, 1), (H_MINUS, 1))
    assert even.margin_vote(0, Fraction(232, 243)) is None
    single = ens((H_MINUS, 1),)
    assert single.margin_vote(0, Fraction(1, 1)) is Label.MINUS
    with pytest.raises(ConfigError):
        e.margin_vote(0, Fraction(1, 2))


def test_margin_vote_exact_boundary():
    e = ens((H_PLUS, 232), (H_MINUS, 11))
    assert e.margin_vote(0, Fraction(232, 243)) is Label.PLUS
    e2 = ens((H_PLUS, 231), (H_MINUS, 12))
    assert e2.margin_vote(0, Fraction(232, 243)) is None


def test_majority_vote_and_ties():
    e = ens((H_PLUS, 2), (H_MINUS, 1))
    assert e.majority_vote(0) is Label.PLUS
    tie = ens((H_PLUS, 1), (H_MINUS, 1))
    assert tie.majority_vote(0) is Label.PLUS  # documented tie rule
    weighted = ens((H_PLUS, 5), (H_MINUS, 7))
    assert weighted.majority_vote(0) is Label.MINUS


def test_margin_loss_enumeration():
    dist, hclass = DistributionSpec("two_point", {"p": [1, 4]}).build()
    h_star = dist.h_star
    good = WeightedEnsemble(((h_star, 3),), (0,), None, 1)
    assert margin_loss(good, dist, Fraction(1, 100)) == 0
    # single-member ensemble: margin loss at 1/2 equals that member's error
    h_plus = hclass.hypothesis(-np.inf, 1)  # constant +1, errs on mass 3/4
    single = WeightedEnsemble(((h_plus, 1),), (0,), None, 1)
    assert margin_loss(single, dist, Fraction(1, 2)) == Fraction(3, 4)
    # hand-enumerated 2-point support with three unit-weight members
    # (two constant +1, one constant -1):
    # on point 0 (label -1, mass 3/4) the two +1 members err -> avg 2/3
    # on point 1 (label +1, mass 1/4) the -1 member errs     -> avg 1/3
    h_minus = hclass.hypothesis(np.inf, 1)  # constant -1
    three = WeightedEnsemble(((h_plus, 2), (h_minus, 1)), (0, 1), None, 2)
    assert margin_loss(three, dist, Fraction(1, 2)) == Fraction(3, 4)
    assert margin_loss(three, dist, Fraction(1, 3)) == 1
    assert margin_loss(three, dist, Fraction(2, 3)) == Fraction(3, 4)


def test_voter_count_formula_and_validation():
    t = voter_count(3 ** 9, 2, Fraction(1, 10))
    expected = math.ceil(
        4 * 243 ** 2 * math.log(2 * 3 ** 9 / (0.1 * (2 + math.log(10))))
    )
    assert t == expected
    with pytest.raises(ConfigError):
        voter_count(3 ** 9, 2, Fraction(3, 2))
    with pytest.raises(ConfigError):
        VoterConfig(t_mode="fixed", fixed_t=0)
    with pytest.raises(ConfigError):
        VoterConfig(t_mode="sometimes")


def test_margin_thresholds_invariants():
    MarginThresholds()
    with pytest.raises(ConfigError):
        MarginThresholds(filter_frac=Fraction(2, 3))
    with pytest.raises(ConfigError):
        MarginThresholds(agree_frac=Fraction(230, 243))
    with pytest.raises(ConfigError):
        MarginThresholds(analysis_frac=Fraction(12, 243))


def _training_instance(k=6):
    dist, hclass = DistributionSpec("rcn", {"eta": [1, 10], "n_points": 4}).build()
    sample = dist.sample(3 ** k, SeedSpec(3).derive(k))
    return dist, hclass, sample


def test_full_ensemble_shape_and_determinism():
    dist, hclass, S = _training_instance(6)
    empty = LabeledSequence.empty(S.domain)
    e = train_full_ensemble(hclass, S, empty, TWENTY_SEVEN_WAY)
    assert len(e) == 27 and e.total_weight == 27 and e.erm_calls == 27
    again = train_full_ensemble(hclass, S, empty, TWENTY_SEVEN_WAY)
    assert e.members == again.members


def test_full_ensemble_base_case_is_erm():
    dist, hclass, _ = _training_instance()
    S = dist.sample(3 ** 5, SeedSpec(4))
    empty = LabeledSequence.empty(S.domain)
    e = train_full_ensemble(hclass, S, empty, TWENTY_SEVEN_WAY)
    assert len(e) == 1
    assert e.members[0][0] == erm(hclass, S).hypothesis


def test_subsample_t_one_and_degenerate_split():
    dist, hclass, S = _training_instance(6)
    empty = LabeledSequence.empty(S.domain)
    cfg = VoterConfig(t_mode="fixed", fixed_t=1)
    e = subsample_ensemble(hclass, S, empty, TWENTY_SEVEN_WAY, cfg, SeedSpec(5))
    assert len(e) == 1 and e.total_weight == 1 and e.erm_calls == 1

    S_small = dist.sample(3 ** 5, SeedSpec(6))
    cfg = VoterConfig(t_mode="fixed", fixed_t=97)
    e = subsample_ensemble(hclass, S_small, empty, TWENTY_SEVEN_WAY, cfg, SeedSpec(7))
    assert len(e) == 1 and e.members[0][1] == 97 and e.erm_calls == 1


def test_subsample_determinism_and_seed_divergence():
    dist, hclass, S = _training_instance(6)
    empty = LabeledSequence.empty(S.domain)
    cfg = VoterConfig(t_mode="fixed", fixed_t=500)
    a = subsample_ensemble(hclass, S, empty, TWENTY_SEVEN_WAY, cfg, SeedSpec(8))
    b = subsample_ensemble(hclass, S, empty, TWENTY_SEVEN_WAY, cfg, SeedSpec(8))
    assert a.members == b.members and a.leaf_indices == b.leaf_indices
    c = subsample_ensemble(hclass, S, empty, TWENTY_SEVEN_WAY, cfg, SeedSpec(9))
    assert a.leaf_indices != c.leaf_indices or tuple(w for _, w in a.members) != tuple(
        w for _, w in c.members
    )


def test_subsample_coupon_collector_hits_all_leaves():
    # t >> L log L: all leaves sampled with overwhelming probability
    dist, hclass, S = _training_instance(7)  # 27 leaves
    empty = LabeledSequence.empty(S.domain)
    t = 27 * int(math.log(27) * 10) * 10
    cfg = VoterConfig(t_mode="fixed", fixed_t=t)
    e = subsample_ensemble(hclass, S, empty, TWENTY_SEVEN_WAY, cfg, SeedSpec(10))
    assert len(e) == 27
    assert e.erm_calls <= min(t, 27)
    assert e.total_weight == t


def test_ensemble_csv_export():
    e = ens((H_PLUS, 3), (H_MINUS, 2))
    text = e.to_csv()
    lines = text.splitlines()
    assert lines[0] == "member,weight,params"
    assert lines[1].startswith("0,3,finite:index=1")
    assert lines[2].startswith("1,2,finite:index=0")


def test_threshold_classes_have_documented_vc():
    from tievote.hypotheses import IntervalClass, ThresholdClass

    assert ThresholdClass(both_orientations=False).vc_dim == 1
    assert ThresholdClass(both_orientations=True).vc_dim == 2
    assert IntervalClass().vc_dim == 2
