"""Holdout selection between the tie-breaking learner and a competitor.

The input sequence is cut into contiguous thirds: the tie learner trains on
the first, a pluggable competitor on the second, and whichever classifier
makes fewer errors on the third (exact rational comparison, ties favoring
the tie learner) is selected.

The bundled default competitor is plain ERM on its shard. A drop-in
replacement implementing the polylog-optimal learner it stands in for would
slot into the same interface; with plain ERM the selected classifier is not
certified for that learner's polylog error branch, only for the holdout
slack of the selection step itself.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Protocol

import numpy as np

from .erm import erm
from .hypotheses import HypothesisClass
from .rng import SeedSpec
from .sequences import LabeledSequence, StructuralError
from .splitting import exact_log3
from .tie import TieClassifier, TieTrainConfig, train_tie

__all__ = [
    "CompetitorLearner",
    "PlainErmLearner",
    "SelectedClassifier",
    "train_select",
]


class CompetitorLearner(Protocol):
    """Training interface for the second candidate."""

    name: str

    def train(self, hclass: HypothesisClass, shard: LabeledSequence, seed: SeedSpec):
        """Return a total, deterministic classifier trained on ``shard``."""
        ...


@dataclass(frozen=True)
class PlainErmLearner:
    """Default competitor: one ERM hypothesis on the whole shard."""

    tie: str = "first"
    name: str = "plain_erm"

    def train(self, hclass: HypothesisClass, shard: LabeledSequence, seed: SeedSpec):
        return erm(hclass, shard, tie=self.tie).hypothesis


class SelectedClassifier:
    """Winner of the holdout comparison, with both holdout errors retained."""

    def __init__(
        self,
        tie_candidate: TieClassifier,
        competitor_candidate,
        holdout_err_tie: Fraction,
        holdout_err_competitor: Fraction,
    ) -> None:
        self.tie_candidate = tie_candidate
        self.competitor_candidate = competitor_candidate
        self.holdout_errors = (holdout_err_tie, holdout_err_competitor)
        self.chosen_side = "tie" if holdout_err_tie <= holdout_err_competitor else "competitor"
        self.chosen = tie_candidate if self.chosen_side == "tie" else competitor_candidate

    def predict_codes(self, points: np.ndarray) -> np.ndarray:
        if hasattr(self.chosen, "predict_codes"):
            return np.asarray(self.chosen.predict_codes(points), dtype=np.int8)
        return np.asarray(self.chosen.predict(points), dtype=np.int8)

    def diagnostics_json(self) -> str:
        tie_err, comp_err = self.holdout_errors
        payload = {
            "chosen_side": self.chosen_side,
            "holdout_err_tie": [tie_err.numerator, tie_err.denominator],
            "holdout_err_competitor": [comp_err.numerator, comp_err.denominator],
            "tie": json.loads(self.tie_candidate.diagnostics_json()),
        }
        return json.dumps(payload, sort_keys=True)


def _holdout_error(classifier, holdout: LabeledSequence) -> Fraction:
    if hasattr(classifier, "predict_codes"):
        preds = classifier.predict_codes(holdout.points)
    else:
        preds = classifier.predict(holdout.points)
    wrong = int(np.count_nonzero(np.asarray(preds, dtype=np.int8) != holdout.label_codes))
    return Fraction(wrong, len(holdout))


def train_select(
    hclass: HypothesisClass,
    S: LabeledSequence,
    competitor: CompetitorLearner,
    cfg: TieTrainConfig,
) -> SelectedClassifier:
    """Train both candidates on disjoint shards and keep the holdout winner.

    ``|S|`` must be ``3^k`` with ``k >= 2`` so all three shards are powers of
    3 and the tie learner can cut its shard into thirds again. Neither
    candidate ever sees the holdout shard.
    """
    k = exact_log3(len(S))
    if k < 2:
        raise StructuralError("selection needs |S| = 3^k with k >= 2")
    third = len(S) // 3
    shard_tie = S.subsequence(1, third)
    shard_comp = S.subsequence(third + 1, 2 * third)
    holdout = S.subsequence(2 * third + 1, len(S))

    tie_clf = train_tie(hclass, shard_tie, cfg.with_seed(cfg.seed.derive(1)))
    comp_clf = competitor.train(hclass, shard_comp, cfg.seed.derive(2))

    err_tie = _holdout_error(tie_clf, holdout)
    err_comp = _holdout_error(comp_clf, holdout)
    return SelectedClassifier(tie_clf, comp_clf, err_tie, err_comp)
