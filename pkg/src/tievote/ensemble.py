"""Weighted voting ensembles over leaf-trained ERM hypotheses.

``train_full_ensemble`` runs the ERM oracle on every leaf of a split family
(one unit-weight member per leaf). ``subsample_ensemble`` draws ``t`` leaf
indices i.i.d. uniformly and stores the result as multiplicity weights over
the distinct sampled leaves, so the theory-scale ``t`` (hundreds of
thousands of voters) costs only one ERM call per distinct leaf.

All vote fractions are exact: weights are integers and comparisons against
thresholds such as 232/243 go through rational arithmetic, never floats.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

import numpy as np

from .erm import erm
from .hypotheses import Hypothesis, HypothesisClass, hypothesis_params
from .rng import SeedSpec
from .sequences import Label, LabeledSequence, StructuralError
from .splitting import SplitParams, split

__all__ = [
    "MarginThresholds",
    "VoterConfig",
    "WeightedEnsemble",
    "train_full_ensemble",
    "subsample_ensemble",
    "margin_loss",
    "voter_count",
    "ConfigError",
]


class ConfigError(ValueError):
    """Invalid run/learner configuration value."""


@dataclass(frozen=True)
class MarginThresholds:
    """The three vote-fraction thresholds used by the tie-breaking learner.

    ``filter_frac`` selects disagreement-region examples, ``agree_frac`` is
    the confident-agreement margin, ``analysis_frac`` is the tighter fraction
    tracked for diagnostics only.
    """

    filter_frac: Fraction = Fraction(11, 243)
    agree_frac: Fraction = Fraction(232, 243)
    analysis_frac: Fraction = Fraction(10, 243)

    def __post_init__(self) -> None:
        if not (0 < self.filter_frac < Fraction(1, 2)):
            raise ConfigError("filter_frac must lie in (0, 1/2)")
        if not (Fraction(1, 2) < self.agree_frac < 1):
            raise ConfigError("agree_frac must lie in (1/2, 1)")
        if self.agree_frac != 1 - self.filter_frac:
            raise ConfigError("agree_frac must equal 1 - filter_frac")
        if not self.analysis_frac < self.filter_frac:
            raise ConfigError("analysis_frac must be below filter_frac")


def voter_count(m: int, d: int, delta: Fraction | float) -> int:
    """Theory voter count ``ceil(4 * 243^2 * ln(2m / (delta*(d + ln(1/delta)))))``."""
    delta = float(delta)
    if not 0 < delta < 1:
        raise ConfigError("delta must lie in (0, 1)")
    t = math.ceil(4 * 243 ** 2 * math.log(2 * m / (delta * (d + math.log(1 / delta)))))
    if t < 1:
        raise ConfigError(f"theory voter count came out nonpositive (t={t}); m too small for delta")
    return t


@dataclass(frozen=True)
class VoterConfig:
    """How many voters to subsample: the theory formula or a fixed count."""

    t_mode: str = "theory"
    delta: Fraction = Fraction(1, 10)
    fixed_t: Optional[int] = None

    def __post_init__(self) -> None:
        if self.t_mode not in ("theory", "fixed"):
            raise ConfigError("t_mode must be 'theory' or 'fixed'")
        if self.t_mode == "fixed":
            if self.fixed_t is None or self.fixed_t < 1:
                raise ConfigError("fixed mode needs fixed_t >= 1")
        if not (0 < Fraction(self.delta) < 1):
            raise ConfigError("delta must lie in (0, 1)")

    def resolve_t(self, m: int, d: int) -> int:
        if self.t_mode == "fixed":
            return int(self.fixed_t)
        return voter_count(m, d, self.delta)


class WeightedEnsemble:
    """Hypotheses with nonnegative integer weights, voting by weighted count.

    ``provenance`` records the leaf indices behind the members and the seed
    used to draw them (``None`` for the full ensemble). ``erm_calls`` is the
    number of ERM oracle invocations made while training this ensemble.
    """

    def __init__(
        self,
        members: Tuple[Tuple[Hypothesis, int], ...],
        leaf_indices: Tuple[int, ...],
        seed: Optional[SeedSpec],
        erm_calls: int,
    ) -> None:
        if not members:
            raise StructuralError("ensemble needs at least one member")
        if any(w < 0 for _, w in members):
            raise StructuralError("weights must be nonnegative")
        total = sum(w for _, w in members)
        if total <= 0:
            raise StructuralError("total weight must be positive")
        self.members = tuple(members)
        self.total_weight = int(total)
        self.leaf_indices = tuple(leaf_indices)
        self.seed = seed
        self.erm_calls = int(erm_calls)

    def __len__(self) -> int:
        return len(self.members)

    # -- batch vote machinery (integer arithmetic throughout) ---------------

    def _weights(self) -> np.ndarray:
        return np.asarray([w for _, w in self.members], dtype=np.int64)

    def member_predictions(self, points: np.ndarray) -> np.ndarray:
        """(n_members, n_points) matrix of label codes."""
        return np.stack([h.predict(points) for h, _ in self.members])

    def wrong_weight(self, points: np.ndarray, label_codes: np.ndarray) -> np.ndarray:
        """Per-example total weight of members mispredicting that example."""
        preds = self.member_predictions(points)
        return self._weights() @ (preds != np.asarray(label_codes, dtype=np.int8))

    def plus_weight(self, points: np.ndarray) -> np.ndarray:
        """Per-point total weight of members voting +1."""
        preds = self.member_predictions(points)
        return self._weights() @ (preds == 1)

    # -- pointwise exact operations -----------------------------------------

    def avg_neq(self, x, y: Label) -> Fraction:
        """Exact weighted fraction of members mispredicting ``(x, y)``."""
        wrong = int(self.wrong_weight(np.asarray([x]), np.asarray([y.code], dtype=np.int8))[0])
        return Fraction(wrong, self.total_weight)

    def margin_vote(self, x, frac: Fraction):
        """Label carrying at least a ``frac`` weight fraction, else ``None``.

        ``frac`` must exceed 1/2 so at most one label can qualify.
        """
        if not frac > Fraction(1, 2):
            raise ConfigError("margin fraction must exceed 1/2")
        code = int(self.margin_vote_codes(np.asarray([x]), frac)[0])
        return None if code == 0 else Label.from_code(code)

    def margin_vote_codes(self, points: np.ndarray, frac: Fraction) -> np.ndarray:
        """Vectorized margin vote: +1/-1 when a label clears ``frac``, else 0."""
        if not frac > Fraction(1, 2):
            raise ConfigError("margin fraction must exceed 1/2")
        w_plus = self.plus_weight(points)
        w_minus = self.total_weight - w_plus
        p, q = frac.numerator, frac.denominator
        bar = p * self.total_weight
        out = np.zeros(len(points), dtype=np.int8)
        out[w_plus * q >= bar] = 1
        out[w_minus * q >= bar] = -1
        return out

    def majority_vote(self, x) -> Label:
        """Sign of the weighted vote; exact ties go to +1."""
        return Label.from_code(int(self.majority_codes(np.asarray([x]))[0]))

    def majority_codes(self, points: np.ndarray) -> np.ndarray:
        w_plus = self.plus_weight(points)
        # tie (2*w_plus == total) counts as +1
        return np.where(2 * w_plus >= self.total_weight, 1, -1).astype(np.int8)

    # -- serialization -------------------------------------------------------

    def to_csv(self) -> str:
        """CSV export: member id, weight, hypothesis parameters."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["member", "weight", "params"])
        for i, (h, w) in enumerate(self.members):
            params = hypothesis_params(h)
            kind = params.pop("kind")
            flat = ";".join(f"{k}={params[k]}" for k in sorted(params))
            writer.writerow([i, w, f"{kind}:{flat}"])
        return buf.getvalue()


def train_full_ensemble(
    hclass: HypothesisClass,
    S: LabeledSequence,
    T: LabeledSequence,
    params: SplitParams,
    tie: str = "first",
) -> WeightedEnsemble:
    """ERM on every leaf of ``split(S, T, params)``, one unit weight each."""
    family = split(S, T, params)
    members = tuple((erm(hclass, leaf, tie=tie).hypothesis, 1) for leaf in family.leaves)
    return WeightedEnsemble(
        members,
        leaf_indices=tuple(range(len(family))),
        seed=None,
        erm_calls=len(family),
    )


def subsample_ensemble(
    hclass: HypothesisClass,
    S: LabeledSequence,
    T: LabeledSequence,
    params: SplitParams,
    cfg: VoterConfig,
    seed: SeedSpec,
    tie: str = "first",
) -> WeightedEnsemble:
    """Ensemble of ``t`` voters drawn uniformly (with replacement) over leaves.

    Stored as multiplicity weights over the distinct sampled leaves; the ERM
    oracle runs once per distinct leaf, so the call count never exceeds
    ``min(t, leaf_count)``.
    """
    family = split(S, T, params)
    n_leaves = len(family)
    t = cfg.resolve_t(m=len(S), d=hclass.vc_dim)
    rng = seed.generator()
    counts = rng.multinomial(t, np.full(n_leaves, 1.0 / n_leaves))
    sampled = np.flatnonzero(counts)
    members = tuple(
        (erm(hclass, family.leaf(int(i)), tie=tie).hypothesis, int(counts[i]))
        for i in sampled
    )
    ensemble = WeightedEnsemble(
        members,
        leaf_indices=tuple(int(i) for i in sampled),
        seed=seed,
        erm_calls=len(sampled),
    )
    assert ensemble.total_weight == t
    return ensemble


def margin_loss(ensemble: WeightedEnsemble, dist, alpha: Fraction) -> Fraction:
    """Probability mass of support examples whose wrong-vote fraction is >= alpha.

    ``dist`` is any finite-support distribution exposing ``points``,
    ``label_codes`` and ``masses`` (see ``distributions.FiniteDistribution``).
    """
    alpha = Fraction(alpha)
    wrong = ensemble.wrong_weight(dist.points, dist.label_codes)
    total = Fraction(0)
    for w, mass in zip(wrong.tolist(), dist.masses):
        if Fraction(int(w), ensemble.total_weight) >= alpha:
            total += mass
    return total
