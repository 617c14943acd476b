"""Run-configuration parsing and validation for the CLI.

Configs are JSON documents; unknown keys anywhere are rejected with the
field path in the error message, and every rational is a two-element
``[numerator, denominator]`` integer pair. Defaults match the learner's
canonical constants (11/243 filter, 232/243 agreement, 27-way split, theory
voter count).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .distributions import DistributionSpec
from .ensemble import MarginThresholds
from .experiments import LEARNERS, ExperimentPlan
from .splitting import PRESETS

__all__ = ["ConfigFileError", "RunConfig", "load_config"]


class ConfigFileError(ValueError):
    """Configuration rejected; message carries the offending field path."""

    def __init__(self, path: str, message: str) -> None:
        super().__init__(f"{path}: {message}")
        self.path = path


def _require_keys(obj: dict, allowed: dict, path: str) -> None:
    for key in obj:
        if key not in allowed:
            raise ConfigFileError(f"{path}.{key}", "unknown key")
    for key, required in allowed.items():
        if required and key not in obj:
            raise ConfigFileError(f"{path}.{key}", "missing required key")


def _fraction(value, path: str) -> Fraction:
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 2
        or not all(isinstance(v, int) and not isinstance(v, bool) for v in value)
    ):
        raise ConfigFileError(path, "rationals are [numerator, denominator] integer pairs")
    if value[1] == 0:
        raise ConfigFileError(path, "zero denominator")
    return Fraction(value[0], value[1])


def _int(value, path: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise ConfigFileError(path, "expected an integer")
    return value


_DIST_KEYS = {
    "rcn": {"kind": True, "eta": True, "n_points": False, "threshold_cut": False,
            "both_orientations": False},
    "hard_realizable": {"kind": True, "n": True, "p": True},
    "two_point": {"kind": True, "p": True},
}


def _parse_distribution(obj, path: str) -> DistributionSpec:
    if not isinstance(obj, dict):
        raise ConfigFileError(path, "expected an object")
    kind = obj.get("kind")
    if kind not in _DIST_KEYS:
        raise ConfigFileError(f"{path}.kind", f"must be one of {sorted(_DIST_KEYS)}")
    _require_keys(obj, _DIST_KEYS[kind], path)
    params = dict(obj)
    params.pop("kind")
    # validate rational fields eagerly so errors carry the right path
    if kind == "rcn":
        _fraction(params["eta"], f"{path}.eta")
        if "n_points" in params:
            _int(params["n_points"], f"{path}.n_points")
        if "threshold_cut" in params:
            _int(params["threshold_cut"], f"{path}.threshold_cut")
    else:
        _fraction(params["p"], f"{path}.p")
        if kind == "hard_realizable":
            _int(params["n"], f"{path}.n")
    return DistributionSpec(kind, params)


@dataclass(frozen=True)
class RunConfig:
    """Validated configuration: an experiment plan plus output paths."""

    plan: ExperimentPlan
    csv_path: Optional[str]
    svg_path: Optional[str]


_TOP_KEYS = {
    "distribution": True,
    "learners": True,
    "m_grid": True,
    "trials": False,
    "delta": False,
    "seed": False,
    "split": False,
    "erm_tie": False,
    "thresholds": False,
    "voter": False,
    "output": False,
}

_THRESHOLD_KEYS = {"filter": False, "agree": False, "analysis": False}
_VOTER_KEYS = {"t_mode": False, "fixed_t": False}
_OUTPUT_KEYS = {"csv": False, "svg": False}


def parse_config(payload: dict) -> RunConfig:
    if not isinstance(payload, dict):
        raise ConfigFileError("$", "config root must be an object")
    _require_keys(payload, _TOP_KEYS, "$")

    dist = _parse_distribution(payload["distribution"], "$.distribution")

    learners = payload["learners"]
    if not isinstance(learners, list) or not learners:
        raise ConfigFileError("$.learners", "expected a nonempty list")
    for i, name in enumerate(learners):
        if name not in LEARNERS:
            raise ConfigFileError(f"$.learners[{i}]", f"must be one of {LEARNERS}")

    m_grid = payload["m_grid"]
    if not isinstance(m_grid, list) or not m_grid:
        raise ConfigFileError("$.m_grid", "expected a nonempty list")
    for i, m in enumerate(m_grid):
        m = _int(m, f"$.m_grid[{i}]")
        n = m
        while n % 3 == 0:
            n //= 3
        if n != 1 or m < 1:
            raise ConfigFileError(f"$.m_grid[{i}]", f"{m} is not a power of 3")

    trials = _int(payload.get("trials", 1), "$.trials")
    delta = _fraction(payload.get("delta", [1, 10]), "$.delta")
    seed = _int(payload.get("seed", 0), "$.seed")

    split = payload.get("split", "ALG2")
    if split not in PRESETS:
        raise ConfigFileError("$.split", f"must be one of {sorted(PRESETS)}")
    erm_tie = payload.get("erm_tie", "first")
    if erm_tie not in ("first", "worst"):
        raise ConfigFileError("$.erm_tie", "must be 'first' or 'worst'")

    th = payload.get("thresholds", {})
    if not isinstance(th, dict):
        raise ConfigFileError("$.thresholds", "expected an object")
    _require_keys(th, _THRESHOLD_KEYS, "$.thresholds")
    thresholds = MarginThresholds(
        filter_frac=_fraction(th["filter"], "$.thresholds.filter") if "filter" in th else Fraction(11, 243),
        agree_frac=_fraction(th["agree"], "$.thresholds.agree") if "agree" in th else Fraction(232, 243),
        analysis_frac=_fraction(th["analysis"], "$.thresholds.analysis") if "analysis" in th else Fraction(10, 243),
    )

    voter = payload.get("voter", {})
    if not isinstance(voter, dict):
        raise ConfigFileError("$.voter", "expected an object")
    _require_keys(voter, _VOTER_KEYS, "$.voter")
    t_mode = voter.get("t_mode", "theory")
    if t_mode not in ("theory", "fixed"):
        raise ConfigFileError("$.voter.t_mode", "must be 'theory' or 'fixed'")
    fixed_t = voter.get("fixed_t")
    if fixed_t is not None:
        fixed_t = _int(fixed_t, "$.voter.fixed_t")

    output = payload.get("output", {})
    if not isinstance(output, dict):
        raise ConfigFileError("$.output", "expected an object")
    _require_keys(output, _OUTPUT_KEYS, "$.output")

    try:
        plan = ExperimentPlan(
            distribution=dist,
            learners=tuple(learners),
            m_grid=tuple(m_grid),
            trials=trials,
            delta=delta,
            master_seed=seed,
            split=split,
            erm_tie=erm_tie,
            t_mode=t_mode,
            fixed_t=fixed_t,
            thresholds=thresholds,
        )
    except ValueError as exc:
        raise ConfigFileError("$", str(exc)) from exc
    return RunConfig(plan=plan, csv_path=output.get("csv"), svg_path=output.get("svg"))


def load_config(path: str) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigFileError("$", f"invalid JSON: {exc}") from exc
    return parse_config(payload)
