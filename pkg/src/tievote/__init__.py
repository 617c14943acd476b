"""Subsampled ERM voting ensembles with margin tie-breaking and holdout selection.

The package trains binary classifiers by recursively splitting the training
sequence, running exact ERM oracles on the leaves, voting with exact integer
weights, and breaking low-margin votes with an ERM fit on the disagreement
region. A holdout selector combines the voting learner with a pluggable
competitor. Everything an experiment measures (true errors, vote fractions,
margin losses) is computed in exact rational arithmetic over finite-support
distributions.
"""

from .sequences import FiniteDomain, Label, LabeledSequence, ScalarDomain
from .rng import SeedSpec
from .splitting import THREE_WAY, TWENTY_SEVEN_WAY, SplitParams, leaf_count, s_cap, split
from .hypotheses import FiniteClass, IntervalClass, ThresholdClass
from .erm import ErmResult, empirical_error, erm
from .ensemble import (
    MarginThresholds,
    VoterConfig,
    WeightedEnsemble,
    margin_loss,
    subsample_ensemble,
    train_full_ensemble,
    voter_count,
)
from .tie import TieClassifier, TieTrainConfig, tie_error, train_tie
from .selection import PlainErmLearner, SelectedClassifier, train_select
from .distributions import (
    DistributionSpec,
    FiniteDistribution,
    exact_error,
    make_hard_realizable,
    make_rcn,
    make_two_point,
)
from .experiments import ExperimentPlan, TrialRecord, aggregate, fit_rate, run_plan
from .estimators import (
    BestOfBothClassifier,
    ErmClassifier,
    FullVoteClassifier,
    SubsampledVoteClassifier,
    TieVoteClassifier,
)

__version__ = "0.1.0"

__all__ = [
    "Label",
    "LabeledSequence",
    "ScalarDomain",
    "FiniteDomain",
    "SeedSpec",
    "SplitParams",
    "THREE_WAY",
    "TWENTY_SEVEN_WAY",
    "split",
    "leaf_count",
    "s_cap",
    "FiniteClass",
    "ThresholdClass",
    "IntervalClass",
    "erm",
    "ErmResult",
    "empirical_error",
    "WeightedEnsemble",
    "VoterConfig",
    "MarginThresholds",
    "train_full_ensemble",
    "subsample_ensemble",
    "margin_loss",
    "voter_count",
    "TieClassifier",
    "TieTrainConfig",
    "train_tie",
    "tie_error",
    "PlainErmLearner",
    "SelectedClassifier",
    "train_select",
    "FiniteDistribution",
    "DistributionSpec",
    "make_rcn",
    "make_hard_realizable",
    "make_two_point",
    "exact_error",
    "ExperimentPlan",
    "TrialRecord",
    "run_plan",
    "aggregate",
    "fit_rate",
    "ErmClassifier",
    "FullVoteClassifier",
    "SubsampledVoteClassifier",
    "TieVoteClassifier",
    "BestOfBothClassifier",
]
