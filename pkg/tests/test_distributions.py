import json
from fractions import Fraction

import numpy as np
import pytest

from tievote.distributions import (
    DistributionSpec,
    FiniteDistribution,
    exact_error,
    make_hard_realizable,
    make_rcn,
    make_two_point,
)
from tievote.ensemble import ConfigError, margin_loss
from tievote.erm import erm
from tievote.hypotheses import FiniteClass, ThresholdClass
from tievote.rng import SeedSpec
from tievote.sequences import FiniteDomain, Label, LabeledSequence, StructuralError


def uniform_marginal(n):
    return [(float(i), Fraction(1, n)) for i in range(1, n + 1)]


def test_rcn_noiseless_is_realizable():
    hclass = ThresholdClass()
    h_star = hclass.hypothesis(2.5, 1)
    dist = make_rcn(hclass, h_star, uniform_marginal(4), Fraction(0))
    assert dist.tau == 0
    assert len(dist) == 4  # zero-mass flip rows are dropped
    assert exact_error(h_star, dist) == 0


def test_rcn_tau_is_eta_exactly():
    hclass = ThresholdClass()
    h_star = hclass.hypothesis(2.5, 1)
    dist = make_rcn(hclass, h_star, uniform_marginal(4), Fraction(1, 10))
    assert dist.tau == Fraction(1, 10)
    assert sum(dist.masses) == 1
    assert exact_error(h_star, dist) == Fraction(1, 10)


def test_rcn_any_other_hypothesis_pays_disagreement():
    hclass = ThresholdClass()
    h_star = hclass.hypothesis(2.5, 1)
    eta = Fraction(1, 10)
    dist = make_rcn(hclass, h_star, uniform_marginal(4), eta)
    for theta in (-np.inf, 0.5, 1.5, 3.5, np.inf):
        for orient in (1, -1):
            h = hclass.hypothesis(theta, orient)
            disagree = Fraction(
                int(np.sum(h.predict(np.asarray([1.0, 2.0, 3.0, 4.0]))
                           != h_star.predict(np.asarray([1.0, 2.0, 3.0, 4.0])))), 4
            )
            assert exact_error(h, dist) == eta + (1 - 2 * eta) * disagree


def test_rcn_rejects_eta_half():
    hclass = ThresholdClass()
    with pytest.raises(ConfigError):
        make_rcn(hclass, hclass.hypothesis(2.5, 1), uniform_marginal(4), Fraction(1, 2))


def test_rcn_rejects_suboptimal_h_star():
    hclass = ThresholdClass()
    wrong = hclass.hypothesis(-np.inf, 1)  # constant +1 is not optimal here
    rows = [
        (1.0, Label.MINUS, Fraction(3, 4)),
        (2.0, Label.PLUS, Fraction(1, 4)),
    ]
    with pytest.raises(StructuralError):
        FiniteDistribution(rows, hclass, wrong)


def test_hard_realizable_construction():
    dist, hclass = make_hard_realizable(2, Fraction(1, 4))
    assert [(p, lab.code, m) for p, lab, m in dist.support] == [
        (0, 1, Fraction(3, 4)),
        (1, 1, Fraction(1, 4)),
    ]
    assert dist.tau == 0
    assert len(hclass) == 2  # 2^(n-1) labelings

    dist9, hclass9 = make_hard_realizable(9, Fraction(8, 6561))
    assert len(hclass9) == 2 ** 8
    assert hclass9.vc_dim == 8
    assert sum(dist9.masses) == 1
    # halving shares: light j has twice the mass of light j+1, last two equal
    lights = [m for p, _, m in dist9.support if p != 0]
    for a, b in zip(lights[:-2], lights[1:-1]):
        assert a == 2 * b
    assert lights[-1] == lights[-2]


def test_hard_realizable_adversarial_erm_mislabels_missing_light():
    dist, hclass = make_hard_realizable(4, Fraction(1, 4))
    # sample that never shows light point 3
    S = LabeledSequence([0, 1, 2, 0], [1, 1, 1, 1], FiniteDomain(4))
    worst = erm(hclass, S, tie="worst").hypothesis
    assert worst.predict(np.asarray([3]))[0] == -1
    first = erm(hclass, S, tie="first").hypothesis
    assert first.predict(np.asarray([3]))[0] == 1


def test_exact_error_cases():
    dist, hclass = make_two_point(Fraction(1, 2))
    const_minus = hclass.hypothesis(np.inf, 1)
    assert exact_error(const_minus, dist) == Fraction(1, 2)
    assert exact_error(dist.h_star, dist) == dist.tau == 0


def test_majority_error_equals_margin_loss_at_half_without_ties():
    dist, hclass = DistributionSpec("rcn", {"eta": [1, 10], "n_points": 5}).build()
    S = dist.sample(3 ** 6, SeedSpec(1))
    from tievote.ensemble import train_full_ensemble
    from tievote.sequences import ScalarDomain

    e = train_full_ensemble(hclass, S, LabeledSequence.empty(ScalarDomain()), __import__("tievote").TWENTY_SEVEN_WAY)
    # 27 members: no exact ties possible, so the two paths agree everywhere
    class Maj:
        def predict_codes(self, pts):
            return e.majority_codes(pts)

    assert exact_error(Maj(), dist) == margin_loss(e, dist, Fraction(1, 2))


def test_sampling_reproducible_and_sized():
    dist, _ = make_two_point(Fraction(1, 4))
    assert len(dist.sample(0, SeedSpec(2))) == 0
    a = dist.sample(100, SeedSpec(3))
    b = dist.sample(100, SeedSpec(3))
    assert a == b
    c = dist.sample(100, SeedSpec(4))
    assert a != c


def test_point_mass_sampling():
    hclass = FiniteClass([[1]])
    dist = make_rcn(hclass, hclass.hypothesis(0), [(0, Fraction(1))], Fraction(0))
    S = dist.sample(50, SeedSpec(5))
    assert len(S) == 50
    assert np.all(S.points == 0) and np.all(S.label_codes == 1)


def test_sampling_frequencies_within_4_sigma():
    dist, _ = DistributionSpec("rcn", {"eta": [1, 4], "n_points": 4}).build()
    m = 10 ** 5
    S = dist.sample(m, SeedSpec(6))
    for (p, lab, mass) in dist.support:
        count = int(np.sum((S.points == p) & (S.label_codes == lab.code)))
        mu = float(mass) * m
        sigma = (float(mass) * (1 - float(mass)) * m) ** 0.5
        assert abs(count - mu) <= 4 * sigma


def test_mass_constraints():
    hclass = FiniteClass([[1]])
    with pytest.raises(StructuralError):
        FiniteDistribution([(0, Label.PLUS, Fraction(1, 2))], hclass, hclass.hypothesis(0))
    with pytest.raises(StructuralError):
        FiniteDistribution(
            [(0, Label.PLUS, Fraction(1, 10 ** 6 + 1)),
             (0, Label.MINUS, 1 - Fraction(1, 10 ** 6 + 1))],
            hclass,
            hclass.hypothesis(0),
        )


def test_json_serialization():
    dist, _ = make_hard_realizable(3, Fraction(1, 4))
    payload = json.loads(dist.to_json())
    assert payload["tau_num"] == 0
    assert payload["class"]["kind"] == "finite"
    assert payload["h_star"] == {"kind": "finite", "index": 0}
    masses = [(r["mass_num"], r["mass_den"]) for r in payload["support"]]
    assert masses == [(3, 4), (1, 8), (1, 8)]


def test_distribution_spec_round_trips_kinds():
    for kind, params in (
        ("rcn", {"eta": [1, 10], "n_points": 6}),
        ("hard_realizable", {"n": 4, "p": [1, 8]}),
        ("two_point", {"p": [1, 3]}),
    ):
        dist, hclass = DistributionSpec(kind, params).build()
        assert sum(dist.masses) == 1
    with pytest.raises(ConfigError):
        DistributionSpec("mystery", {}).build()
