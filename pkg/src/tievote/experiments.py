"""Monte Carlo experiment harness.

A plan is a grid of (learner, m) cells; each cell runs ``trials`` independent
train/evaluate rounds. Per-trial true errors are computed exactly by support
enumeration, so the only randomness in the records is the training-sample
draw (and voter subsampling). Records are keyed by (learner, m, trial) with
the trial seed derived from the cell id, which makes results independent of
execution order and safe to compute in parallel.
"""

from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .distributions import DistributionSpec, FiniteDistribution, exact_error
from .ensemble import (
    ConfigError,
    MarginThresholds,
    VoterConfig,
    margin_loss,
    subsample_ensemble,
    train_full_ensemble,
)
from .erm import erm
from .hypotheses import HypothesisClass
from .rng import SeedSpec
from .selection import PlainErmLearner, train_select
from .sequences import LabeledSequence
from .splitting import PRESETS, exact_log3
from .tie import TieTrainConfig, train_tie

__all__ = [
    "LEARNERS",
    "ExperimentPlan",
    "TrialRecord",
    "PlanResult",
    "run_plan",
    "aggregate",
    "fit_rate",
    "records_to_csv",
    "records_from_csv",
    "CSV_HEADER",
]

LEARNERS = ("plain_erm", "full_vote", "subsampled_vote", "tie", "selected")

CSV_HEADER = (
    "trial,learner,m,tau_num,tau_den,err_num,err_den,excess_num,excess_den,"
    "margin10_num,margin10_den,margin11_num,margin11_den,s3neq,fallback,erm_calls,ms"
)


@dataclass(frozen=True)
class ExperimentPlan:
    """Declarative description of one sweep."""

    distribution: DistributionSpec
    learners: Tuple[str, ...]
    m_grid: Tuple[int, ...]
    trials: int
    delta: Fraction = Fraction(1, 10)
    master_seed: int = 0
    split: str = "ALG2"
    erm_tie: str = "first"
    t_mode: str = "theory"
    fixed_t: Optional[int] = None
    thresholds: MarginThresholds = field(default_factory=MarginThresholds)

    def __post_init__(self) -> None:
        for name in self.learners:
            if name not in LEARNERS:
                raise ConfigError(f"unknown learner {name!r}; choose from {LEARNERS}")
        for m in self.m_grid:
            try:
                exact_log3(m)
            except Exception as exc:
                raise ConfigError(f"m grid entries must be powers of 3: {exc}") from exc
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.split not in PRESETS:
            raise ConfigError(f"split must be one of {sorted(PRESETS)}")

    def voter_config(self) -> VoterConfig:
        return VoterConfig(t_mode=self.t_mode, delta=self.delta, fixed_t=self.fixed_t)

    def cells(self) -> List[Tuple[int, str, int]]:
        """(cell_index, learner, m) in deterministic roster x grid order."""
        out = []
        idx = 0
        for learner in self.learners:
            for m in self.m_grid:
                out.append((idx, learner, m))
                idx += 1
        return out

    def to_dict(self) -> dict:
        return {
            "distribution": {"kind": self.distribution.kind, "params": self.distribution.params},
            "learners": list(self.learners),
            "m_grid": list(self.m_grid),
            "trials": self.trials,
            "delta": [self.delta.numerator, self.delta.denominator],
            "master_seed": self.master_seed,
            "split": self.split,
            "erm_tie": self.erm_tie,
            "t_mode": self.t_mode,
            "fixed_t": self.fixed_t,
            "thresholds": {
                "filter": [self.thresholds.filter_frac.numerator, self.thresholds.filter_frac.denominator],
                "agree": [self.thresholds.agree_frac.numerator, self.thresholds.agree_frac.denominator],
                "analysis": [self.thresholds.analysis_frac.numerator, self.thresholds.analysis_frac.denominator],
            },
        }

    @staticmethod
    def from_dict(payload: dict) -> "ExperimentPlan":
        th = payload.get("thresholds", {})
        thresholds = MarginThresholds(
            filter_frac=Fraction(*th.get("filter", (11, 243))),
            agree_frac=Fraction(*th.get("agree", (232, 243))),
            analysis_frac=Fraction(*th.get("analysis", (10, 243))),
        )
        return ExperimentPlan(
            distribution=DistributionSpec(
                payload["distribution"]["kind"], payload["distribution"]["params"]
            ),
            learners=tuple(payload["learners"]),
            m_grid=tuple(int(m) for m in payload["m_grid"]),
            trials=int(payload["trials"]),
            delta=Fraction(*payload.get("delta", (1, 10))),
            master_seed=int(payload.get("master_seed", 0)),
            split=payload.get("split", "ALG2"),
            erm_tie=payload.get("erm_tie", "first"),
            t_mode=payload.get("t_mode", "theory"),
            fixed_t=payload.get("fixed_t"),
            thresholds=thresholds,
        )


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    learner: str
    m: int
    tau: Fraction
    err: Fraction
    margin10: Optional[Fraction]
    margin11: Optional[Fraction]
    s3neq: Optional[int]
    fallback: Optional[bool]
    erm_calls: int
    ms: int

    @property
    def excess(self) -> Fraction:
        return self.err - self.tau


@dataclass(frozen=True)
class SkippedCell:
    learner: str
    m: int
    reason: str


@dataclass
class PlanResult:
    records: List[TrialRecord]
    skips: List[SkippedCell]


# ---------------------------------------------------------------------------
# single-trial training


def _feasibility(learner: str, m: int) -> Optional[str]:
    k = exact_log3(m)
    if learner == "tie" and k < 1:
        return "tie learner needs m = 3^k with k >= 1 to cut thirds"
    if learner == "selected" and k < 2:
        return "selection needs m = 3^k with k >= 2"
    return None


def _run_trial(
    dist: FiniteDistribution,
    hclass: HypothesisClass,
    plan: ExperimentPlan,
    learner: str,
    m: int,
    trial: int,
    cell_index: int,
    measure_time: bool,
) -> TrialRecord:
    seed = SeedSpec(plan.master_seed).derive(cell_index).derive(trial)
    sample = dist.sample(m, seed.derive(0))
    train_seed = seed.derive(1)
    empty = LabeledSequence.empty(sample.domain)
    split_params = PRESETS[plan.split]
    started = time.perf_counter() if measure_time else 0.0

    margin10 = margin11 = None
    s3neq = None
    fallback = None

    if learner == "plain_erm":
        h = erm(hclass, sample, tie=plan.erm_tie).hypothesis
        err = exact_error(h, dist)
        erm_calls = 1
    elif learner == "full_vote":
        ens = train_full_ensemble(hclass, sample, empty, split_params, tie=plan.erm_tie)
        err = exact_error(_MajorityClassifier(ens), dist)
        margin10 = margin_loss(ens, dist, plan.thresholds.analysis_frac)
        margin11 = margin_loss(ens, dist, plan.thresholds.filter_frac)
        erm_calls = ens.erm_calls
    elif learner == "subsampled_vote":
        ens = subsample_ensemble(
            hclass, sample, empty, split_params, plan.voter_config(), train_seed, tie=plan.erm_tie
        )
        err = exact_error(_MajorityClassifier(ens), dist)
        margin10 = margin_loss(ens, dist, plan.thresholds.analysis_frac)
        margin11 = margin_loss(ens, dist, plan.thresholds.filter_frac)
        erm_calls = ens.erm_calls
    elif learner == "tie":
        cfg = TieTrainConfig(
            split_params=split_params,
            voter=plan.voter_config(),
            thresholds=plan.thresholds,
            erm_tie=plan.erm_tie,
            seed=train_seed,
        )
        clf = train_tie(hclass, sample, cfg)
        err = exact_error(clf, dist)
        margin10 = max(
            margin_loss(clf.ensemble_1, dist, plan.thresholds.analysis_frac),
            margin_loss(clf.ensemble_2, dist, plan.thresholds.analysis_frac),
        )
        margin11 = max(
            margin_loss(clf.ensemble_1, dist, plan.thresholds.filter_frac),
            margin_loss(clf.ensemble_2, dist, plan.thresholds.filter_frac),
        )
        s3neq = clf.diagnostics.s3neq
        fallback = clf.diagnostics.fallback
        erm_calls = clf.diagnostics.erm_calls_total
    elif learner == "selected":
        cfg = TieTrainConfig(
            split_params=split_params,
            voter=plan.voter_config(),
            thresholds=plan.thresholds,
            erm_tie=plan.erm_tie,
            seed=train_seed,
        )
        sel = train_select(hclass, sample, PlainErmLearner(tie=plan.erm_tie), cfg)
        err = exact_error(sel, dist)
        s3neq = sel.tie_candidate.diagnostics.s3neq
        fallback = sel.tie_candidate.diagnostics.fallback
        erm_calls = sel.tie_candidate.diagnostics.erm_calls_total + 1
    else:  # pragma: no cover - guarded by plan validation
        raise ConfigError(f"unknown learner {learner!r}")

    elapsed_ms = int(round((time.perf_counter() - started) * 1000)) if measure_time else 0
    return TrialRecord(
        trial=trial,
        learner=learner,
        m=m,
        tau=dist.tau,
        err=err,
        margin10=margin10,
        margin11=margin11,
        s3neq=s3neq,
        fallback=fallback,
        erm_calls=erm_calls,
        ms=elapsed_ms,
    )


class _MajorityClassifier:
    def __init__(self, ensemble) -> None:
        self.ensemble = ensemble

    def predict_codes(self, points: np.ndarray) -> np.ndarray:
        return self.ensemble.majority_codes(points)


# ---------------------------------------------------------------------------
# plan execution


@lru_cache(maxsize=4)
def _cached_instance(payload_json: str):
    import json

    payload = json.loads(payload_json)
    spec = DistributionSpec(payload["kind"], payload["params"])
    return spec.build()


def _instance_key(plan: ExperimentPlan) -> str:
    import json

    return json.dumps(
        {"kind": plan.distribution.kind, "params": plan.distribution.params}, sort_keys=True
    )


def _run_chunk(plan_dict: dict, cell_index: int, learner: str, m: int,
               trials: Sequence[int], measure_time: bool) -> List[TrialRecord]:
    plan = ExperimentPlan.from_dict(plan_dict)
    dist, hclass = _cached_instance(_instance_key(plan))
    return [
        _run_trial(dist, hclass, plan, learner, m, trial, cell_index, measure_time)
        for trial in trials
    ]


def run_plan(plan: ExperimentPlan, jobs: int = 1, measure_time: bool = False) -> PlanResult:
    """Run every feasible cell of the plan.

    Results are deterministic given the plan regardless of ``jobs``; trial
    seeds depend only on (master seed, cell index, trial index). Infeasible
    cells are reported in ``skips``, never silently dropped. ``measure_time``
    fills the ``ms`` field with wall-clock training time; it defaults to off
    so serialized outputs stay byte-reproducible.
    """
    dist, hclass = _cached_instance(_instance_key(plan))
    records: List[TrialRecord] = []
    skips: List[SkippedCell] = []
    tasks = []
    for cell_index, learner, m in plan.cells():
        reason = _feasibility(learner, m)
        if reason is not None:
            skips.append(SkippedCell(learner, m, reason))
            continue
        tasks.append((cell_index, learner, m))

    if jobs <= 1:
        for cell_index, learner, m in tasks:
            records.extend(
                _run_trial(dist, hclass, plan, learner, m, trial, cell_index, measure_time)
                for trial in range(plan.trials)
            )
    else:
        plan_dict = plan.to_dict()
        chunks_per_cell = max(1, math.ceil(4 * jobs / max(1, len(tasks))))
        chunk = max(1, math.ceil(plan.trials / chunks_per_cell))
        futures = []
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for cell_index, learner, m in tasks:
                for start in range(0, plan.trials, chunk):
                    trials = range(start, min(start + chunk, plan.trials))
                    futures.append(
                        pool.submit(_run_chunk, plan_dict, cell_index, learner, m,
                                    list(trials), measure_time)
                    )
            for fut in futures:
                records.extend(fut.result())
        order = {(learner, m): i for i, (_, learner, m) in enumerate(plan.cells())}
        records.sort(key=lambda r: (order[(r.learner, r.m)], r.trial))
    return PlanResult(records=records, skips=skips)


# ---------------------------------------------------------------------------
# aggregation


@dataclass(frozen=True)
class CellSummary:
    learner: str
    m: int
    n: int
    mean_err: Fraction
    median_err: Fraction
    q05_err: Fraction
    q95_err: Fraction
    mean_excess: Fraction
    median_excess: Fraction
    q05_excess: Fraction
    q95_excess: Fraction


def _nearest_rank(sorted_values: List[Fraction], q: Fraction) -> Fraction:
    n = len(sorted_values)
    rank = max(1, math.ceil(q * n))
    return sorted_values[rank - 1]


def aggregate(records: Sequence[TrialRecord]) -> List[CellSummary]:
    """Per-cell exact means and nearest-rank quantiles of error and excess."""
    groups: Dict[Tuple[str, int], List[TrialRecord]] = {}
    order: List[Tuple[str, int]] = []
    for rec in records:
        key = (rec.learner, rec.m)
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(rec)
    out = []
    for key in order:
        rows = groups[key]
        errs = sorted(r.err for r in rows)
        excesses = sorted(r.excess for r in rows)
        n = len(rows)
        out.append(
            CellSummary(
                learner=key[0],
                m=key[1],
                n=n,
                mean_err=sum(errs, Fraction(0)) / n,
                median_err=_nearest_rank(errs, Fraction(1, 2)),
                q05_err=_nearest_rank(errs, Fraction(1, 20)),
                q95_err=_nearest_rank(errs, Fraction(19, 20)),
                mean_excess=sum(excesses, Fraction(0)) / n,
                median_excess=_nearest_rank(excesses, Fraction(1, 2)),
                q05_excess=_nearest_rank(excesses, Fraction(1, 20)),
                q95_excess=_nearest_rank(excesses, Fraction(19, 20)),
            )
        )
    return out


def fit_rate(points: Sequence[Tuple[int, Fraction]]) -> Optional[float]:
    """Least-squares slope of log(excess) against log(m).

    Grid points with nonpositive excess are excluded; with fewer than three
    remaining points there is no fit and ``None`` is returned. The regression
    runs in double precision (the only floating-point site in the harness)
    and is therefore approximate.
    """
    xs, ys = [], []
    for m, excess in points:
        if excess > 0:
            xs.append(math.log(float(m)))
            ys.append(math.log(float(excess)))
    if len(xs) < 3:
        return None
    slope, _ = np.polyfit(np.asarray(xs), np.asarray(ys), 1)
    return float(slope)


# ---------------------------------------------------------------------------
# CSV


def _frac_fields(value: Optional[Fraction]) -> Tuple[str, str]:
    if value is None:
        return ("", "")
    return (str(value.numerator), str(value.denominator))


def records_to_csv(records: Sequence[TrialRecord]) -> str:
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    for r in records:
        writer.writerow(
            [
                r.trial,
                r.learner,
                r.m,
                r.tau.numerator,
                r.tau.denominator,
                r.err.numerator,
                r.err.denominator,
                r.excess.numerator,
                r.excess.denominator,
                *_frac_fields(r.margin10),
                *_frac_fields(r.margin11),
                "" if r.s3neq is None else r.s3neq,
                "" if r.fallback is None else int(r.fallback),
                r.erm_calls,
                r.ms,
            ]
        )
    return buf.getvalue()


def records_from_csv(text: str) -> List[TrialRecord]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or ",".join(rows[0]) != CSV_HEADER:
        raise ConfigError("unexpected results CSV header")
    out = []
    for row in rows[1:]:
        (trial, learner, m, tau_n, tau_d, err_n, err_d, _exc_n, _exc_d,
         m10_n, m10_d, m11_n, m11_d, s3neq, fallback, erm_calls, ms) = row
        out.append(
            TrialRecord(
                trial=int(trial),
                learner=learner,
                m=int(m),
                tau=Fraction(int(tau_n), int(tau_d)),
                err=Fraction(int(err_n), int(err_d)),
                margin10=Fraction(int(m10_n), int(m10_d)) if m10_n else None,
                margin11=Fraction(int(m11_n), int(m11_d)) if m11_n else None,
                s3neq=int(s3neq) if s3neq else None,
                fallback=bool(int(fallback)) if fallback else None,
                erm_calls=int(erm_calls),
                ms=int(ms),
            )
        )
    return out
