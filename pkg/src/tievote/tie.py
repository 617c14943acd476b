"""The margin tie-breaking classifier.

Training takes one sequence whose length is three times a power of 3, cuts it
into contiguous thirds, trains an independent subsampled voting ensemble on
each of the first two thirds, and uses the last third to fit the tie-breaker:
every example on which either ensemble's wrong-vote fraction reaches the
filter threshold lands in the disagreement set, and an ERM on that set yields
``h_tie``. Prediction outputs a label both ensembles agree on with at least
the agreement margin, and defers to ``h_tie`` everywhere else.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from fractions import Fraction


import numpy as np

from .ensemble import (
    ConfigError,
    MarginThresholds,
    VoterConfig,
    WeightedEnsemble,
    subsample_ensemble,
)
from .erm import erm
from .hypotheses import Hypothesis, HypothesisClass, hypothesis_params
from .rng import SeedSpec
from .sequences import Label, LabeledSequence, StructuralError
from .splitting import TWENTY_SEVEN_WAY, SplitParams, exact_log3

__all__ = ["TieTrainConfig", "TieClassifier", "train_tie", "tie_error"]

FILTER_MODES = ("own_label", "disagreement")


@dataclass(frozen=True)
class TieTrainConfig:
    """Everything :func:`train_tie` needs besides the data."""

    split_params: SplitParams = TWENTY_SEVEN_WAY
    voter: VoterConfig = field(default_factory=VoterConfig)
    thresholds: MarginThresholds = field(default_factory=MarginThresholds)
    erm_tie: str = "first"
    seed: SeedSpec = field(default_factory=lambda: SeedSpec(0))
    filter_mode: str = "own_label"

    def __post_init__(self) -> None:
        if self.filter_mode not in FILTER_MODES:
            raise ConfigError(f"filter_mode must be one of {FILTER_MODES}")

    def with_seed(self, seed: SeedSpec) -> "TieTrainConfig":
        return replace(self, seed=seed)


@dataclass(frozen=True)
class TieDiagnostics:
    third_size: int
    t1: int
    t2: int
    s3neq: int
    fallback: bool
    erm_calls_1: int
    erm_calls_2: int
    erm_calls_total: int

    def to_json(self) -> str:
        return json.dumps(
            {
                "third_size": self.third_size,
                "t1": self.t1,
                "t2": self.t2,
                "s3neq": self.s3neq,
                "fallback": self.fallback,
                "erm_calls_1": self.erm_calls_1,
                "erm_calls_2": self.erm_calls_2,
                "erm_calls": self.erm_calls_total,
            },
            sort_keys=True,
        )


class TieClassifier:
    """Two voting ensembles plus the disagreement-region tie-breaker."""

    def __init__(
        self,
        ensemble_1: WeightedEnsemble,
        ensemble_2: WeightedEnsemble,
        h_tie: Hypothesis,
        thresholds: MarginThresholds,
        diagnostics: TieDiagnostics,
    ) -> None:
        self.ensemble_1 = ensemble_1
        self.ensemble_2 = ensemble_2
        self.h_tie = h_tie
        self.thresholds = thresholds
        self.diagnostics = diagnostics

    def predict_codes(self, points: np.ndarray) -> np.ndarray:
        """Vectorized prediction as label codes."""
        frac = self.thresholds.agree_frac
        v1 = self.ensemble_1.margin_vote_codes(points, frac)
        v2 = self.ensemble_2.margin_vote_codes(points, frac)
        agreed = (v1 == v2) & (v1 != 0)
        out = self.h_tie.predict(points).astype(np.int8)
        out[agreed] = v1[agreed]
        return out

    def predict_point(self, x) -> Label:
        return Label.from_code(int(self.predict_codes(np.asarray([x]))[0]))

    def diagnostics_json(self) -> str:
        return self.diagnostics.to_json()

    def h_tie_params(self) -> dict:
        return hypothesis_params(self.h_tie)


def _contiguous_thirds(S: LabeledSequence):
    m = len(S)
    if m % 3 != 0:
        raise StructuralError(f"sequence length {m} is not divisible into thirds")
    third = m // 3
    exact_log3(third)  # thirds must themselves be powers of 3
    return (
        S.subsequence(1, third),
        S.subsequence(third + 1, 2 * third),
        S.subsequence(2 * third + 1, m),
    )


def train_tie(hclass: HypothesisClass, S1: LabeledSequence, cfg: TieTrainConfig) -> TieClassifier:
    """Train the tie-breaking classifier on ``S1`` (length ``3 * 3^k``).

    The two ensembles use independently derived seeds and disjoint data, so
    they could train in parallel; experiment harnesses parallelize across
    trials instead, where the wins are larger.
    """
    part_1, part_2, part_3 = _contiguous_thirds(S1)
    empty = LabeledSequence.empty(S1.domain)

    ensemble_1 = subsample_ensemble(
        hclass, part_1, empty, cfg.split_params, cfg.voter, cfg.seed.derive(1), tie=cfg.erm_tie
    )
    ensemble_2 = subsample_ensemble(
        hclass, part_2, empty, cfg.split_params, cfg.voter, cfg.seed.derive(2), tie=cfg.erm_tie
    )

    if cfg.filter_mode == "own_label":
        selected = _filter_own_label(ensemble_1, ensemble_2, part_3, cfg.thresholds.filter_frac)
    else:
        selected = _filter_disagreement(ensemble_1, ensemble_2, part_3, cfg.thresholds.agree_frac)
    disagree_seq = part_3.take(selected)

    fallback = len(disagree_seq) == 0
    tie_input = part_3 if fallback else disagree_seq
    h_tie = erm(hclass, tie_input, tie=cfg.erm_tie).hypothesis

    diagnostics = TieDiagnostics(
        third_size=len(part_1),
        t1=ensemble_1.total_weight,
        t2=ensemble_2.total_weight,
        s3neq=len(disagree_seq),
        fallback=fallback,
        erm_calls_1=ensemble_1.erm_calls,
        erm_calls_2=ensemble_2.erm_calls,
        erm_calls_total=ensemble_1.erm_calls + ensemble_2.erm_calls + 1,
    )
    return TieClassifier(ensemble_1, ensemble_2, h_tie, cfg.thresholds, diagnostics)


def _filter_own_label(
    e1: WeightedEnsemble, e2: WeightedEnsemble, part_3: LabeledSequence, filter_frac: Fraction
) -> np.ndarray:
    """Indices of examples whose own label is missed by a filter_frac vote
    fraction of either ensemble."""
    w1 = e1.wrong_weight(part_3.points, part_3.label_codes)
    w2 = e2.wrong_weight(part_3.points, part_3.label_codes)
    p, q = filter_frac.numerator, filter_frac.denominator
    hit = (w1 * q >= p * e1.total_weight) | (w2 * q >= p * e2.total_weight)
    return np.flatnonzero(hit)


def _filter_disagreement(
    e1: WeightedEnsemble, e2: WeightedEnsemble, part_3: LabeledSequence, agree_frac: Fraction
) -> np.ndarray:
    """Ablation filter: points where the margin votes differ or either
    ensemble reaches no consensus."""
    v1 = e1.margin_vote_codes(part_3.points, agree_frac)
    v2 = e2.margin_vote_codes(part_3.points, agree_frac)
    hit = (v1 != v2) | (v1 == 0) | (v2 == 0)
    return np.flatnonzero(hit)


def tie_error(classifier: TieClassifier, dist) -> Fraction:
    """Exact true error of the tie classifier under a finite distribution."""
    preds = classifier.predict_codes(dist.points)
    total = Fraction(0)
    for pred, code, mass in zip(preds.tolist(), dist.label_codes.tolist(), dist.masses):
        if pred != code:
            total += mass
    return total
