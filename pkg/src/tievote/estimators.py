"""scikit-learn style estimators wrapping the training pipelines.

All estimators follow the usual contract: keyword constructor arguments are
stored verbatim (``get_params``/``set_params`` work), ``fit(X, y)`` trains and
returns ``self``, ``predict(X)`` emits -1/+1 labels. ``X`` is a flat array
(or single column) of scalar points or finite-domain indices, matching the
bound hypothesis class.

>>> clf = ErmClassifier(ThresholdClass()).fit([1., 2., 3.], [-1, -1, 1])
>>> clf.predict([0., 5.]).tolist()
[-1, 1]
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.exceptions import NotFittedError

from .ensemble import MarginThresholds, VoterConfig, subsample_ensemble, train_full_ensemble
from .erm import erm
from .hypotheses import HypothesisClass, ThresholdClass
from .rng import SeedSpec
from .selection import PlainErmLearner, train_select
from .sequences import LabeledSequence
from .splitting import PRESETS
from .tie import TieTrainConfig, train_tie
from .validation import check_X, sequence_from_arrays

__all__ = [
    "ErmClassifier",
    "FullVoteClassifier",
    "SubsampledVoteClassifier",
    "TieVoteClassifier",
    "BestOfBothClassifier",
]


def _as_fraction(value) -> Fraction:
    """Accept Fraction-likes and (num, den) pairs, the config currency."""
    if isinstance(value, (tuple, list)):
        return Fraction(*value)
    return Fraction(value)


class _BaseVoteEstimator(BaseEstimator, ClassifierMixin):
    def _check_fitted(self):
        if not hasattr(self, "model_"):
            raise NotFittedError("call fit before predict")

    def predict(self, X):
        self._check_fitted()
        points = check_X(X, self.hypothesis_class)
        if hasattr(self.model_, "predict_codes"):
            codes = self.model_.predict_codes(points)
        elif hasattr(self.model_, "majority_codes"):
            codes = self.model_.majority_codes(points)
        else:
            codes = self.model_.predict(points)
        return np.asarray(codes, dtype=np.int64)

    def _post_fit(self):
        self.classes_ = np.array([-1, 1], dtype=np.int64)
        return self


class ErmClassifier(_BaseVoteEstimator):
    """Single exact-ERM hypothesis."""

    def __init__(self, hypothesis_class: HypothesisClass = ThresholdClass(), erm_tie: str = "first"):
        self.hypothesis_class = hypothesis_class
        self.erm_tie = erm_tie

    def fit(self, X, y):
        seq = sequence_from_arrays(X, y, self.hypothesis_class)
        result = erm(self.hypothesis_class, seq, tie=self.erm_tie)
        self.model_ = result.hypothesis
        self.empirical_errors_ = result.empirical_errors
        return self._post_fit()


class FullVoteClassifier(_BaseVoteEstimator):
    """Equal-weight majority vote over ERMs trained on every split leaf.

    ``fit`` requires ``len(X)`` to be a power of 3.
    """

    def __init__(
        self,
        hypothesis_class: HypothesisClass = ThresholdClass(),
        split: str = "ALG2",
        erm_tie: str = "first",
    ):
        self.hypothesis_class = hypothesis_class
        self.split = split
        self.erm_tie = erm_tie

    def fit(self, X, y):
        seq = sequence_from_arrays(X, y, self.hypothesis_class)
        self.model_ = train_full_ensemble(
            self.hypothesis_class,
            seq,
            LabeledSequence.empty(seq.domain),
            PRESETS[self.split],
            tie=self.erm_tie,
        )
        return self._post_fit()


class SubsampledVoteClassifier(_BaseVoteEstimator):
    """Majority vote over voters subsampled from the split-leaf ensemble."""

    def __init__(
        self,
        hypothesis_class: HypothesisClass = ThresholdClass(),
        split: str = "ALG2",
        t_mode: str = "theory",
        fixed_t: int | None = None,
        delta=Fraction(1, 10),
        erm_tie: str = "first",
        random_state: int = 0,
    ):
        self.hypothesis_class = hypothesis_class
        self.split = split
        self.t_mode = t_mode
        self.fixed_t = fixed_t
        self.delta = delta
        self.erm_tie = erm_tie
        self.random_state = random_state

    def fit(self, X, y):
        seq = sequence_from_arrays(X, y, self.hypothesis_class)
        cfg = VoterConfig(t_mode=self.t_mode, delta=_as_fraction(self.delta), fixed_t=self.fixed_t)
        self.model_ = subsample_ensemble(
            self.hypothesis_class,
            seq,
            LabeledSequence.empty(seq.domain),
            PRESETS[self.split],
            cfg,
            SeedSpec(self.random_state),
            tie=self.erm_tie,
        )
        return self._post_fit()


class TieVoteClassifier(_BaseVoteEstimator):
    """Two subsampled voting ensembles with a disagreement-trained tie-breaker.

    ``fit`` requires ``len(X) = 3 * 3^k`` so the training sequence cuts into
    three power-of-3 thirds.
    """

    def __init__(
        self,
        hypothesis_class: HypothesisClass = ThresholdClass(),
        split: str = "ALG2",
        t_mode: str = "theory",
        fixed_t: int | None = None,
        delta=Fraction(1, 10),
        filter_frac=Fraction(11, 243),
        agree_frac=Fraction(232, 243),
        erm_tie: str = "first",
        filter_mode: str = "own_label",
        random_state: int = 0,
    ):
        self.hypothesis_class = hypothesis_class
        self.split = split
        self.t_mode = t_mode
        self.fixed_t = fixed_t
        self.delta = delta
        self.filter_frac = filter_frac
        self.agree_frac = agree_frac
        self.erm_tie = erm_tie
        self.filter_mode = filter_mode
        self.random_state = random_state

    def _train_config(self) -> TieTrainConfig:
        return TieTrainConfig(
            split_params=PRESETS[self.split],
            voter=VoterConfig(t_mode=self.t_mode, delta=_as_fraction(self.delta), fixed_t=self.fixed_t),
            thresholds=MarginThresholds(
                filter_frac=_as_fraction(self.filter_frac),
                agree_frac=_as_fraction(self.agree_frac),
            ),
            erm_tie=self.erm_tie,
            seed=SeedSpec(self.random_state),
            filter_mode=self.filter_mode,
        )

    def fit(self, X, y):
        seq = sequence_from_arrays(X, y, self.hypothesis_class)
        self.model_ = train_tie(self.hypothesis_class, seq, self._train_config())
        self.diagnostics_ = self.model_.diagnostics
        return self._post_fit()


class BestOfBothClassifier(_BaseVoteEstimator):
    """Tie-vote learner vs. a competitor, picked by holdout comparison.

    The competitor defaults to plain ERM on its own shard; any object with a
    ``train(hypothesis_class, shard, seed)`` method can stand in. ``fit``
    requires ``len(X) = 3^k`` with ``k >= 2``.
    """

    def __init__(
        self,
        hypothesis_class: HypothesisClass = ThresholdClass(),
        competitor=None,
        split: str = "ALG2",
        t_mode: str = "theory",
        fixed_t: int | None = None,
        delta=Fraction(1, 10),
        erm_tie: str = "first",
        random_state: int = 0,
    ):
        self.hypothesis_class = hypothesis_class
        self.competitor = competitor
        self.split = split
        self.t_mode = t_mode
        self.fixed_t = fixed_t
        self.delta = delta
        self.erm_tie = erm_tie
        self.random_state = random_state

    def fit(self, X, y):
        seq = sequence_from_arrays(X, y, self.hypothesis_class)
        cfg = TieTrainConfig(
            split_params=PRESETS[self.split],
            voter=VoterConfig(t_mode=self.t_mode, delta=_as_fraction(self.delta), fixed_t=self.fixed_t),
            erm_tie=self.erm_tie,
            seed=SeedSpec(self.random_state),
        )
        competitor = self.competitor if self.competitor is not None else PlainErmLearner(tie=self.erm_tie)
        self.model_ = train_select(self.hypothesis_class, seq, competitor, cfg)
        self.chosen_side_ = self.model_.chosen_side
        self.holdout_errors_ = self.model_.holdout_errors
        return self._post_fit()
