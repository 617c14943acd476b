"""Finite-support synthetic distributions with exactly known best-in-class error.

Every distribution built here carries its hypothesis class, the class-optimal
hypothesis ``h_star`` and the exact optimal error ``tau`` as a rational.
Construction verifies optimality by direct scan (full enumeration for finite
classes, candidate cuts / endpoint pairs for thresholds and intervals), so
evaluation against these distributions involves no estimation error at all;
randomness enters experiments only through training-sample draws.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Tuple

import numpy as np

from .hypotheses import (
    FiniteClass,
    FiniteDomain,
    Hypothesis,
    HypothesisClass,
    IntervalClass,
    ThresholdClass,
    hypothesis_params,
)
from .rng import SeedSpec
from .sequences import Label, LabeledSequence, ScalarDomain, StructuralError
from .ensemble import ConfigError

__all__ = [
    "FiniteDistribution",
    "DistributionSpec",
    "make_rcn",
    "make_hard_realizable",
    "make_two_point",
    "exact_error",
]

MAX_MASS_DENOMINATOR = 10 ** 6


class FiniteDistribution:
    """Distribution over finitely many ``(point, label)`` pairs.

    Parameters
    ----------
    rows : sequence of (point, Label, Fraction)
        Support rows; masses must be positive rationals summing to one, with
        denominators at most 10**6.
    hclass : HypothesisClass
        Class the distribution is bound to.
    h_star : Hypothesis
        Claimed class-optimal hypothesis; optimality is verified exactly at
        construction.
    """

    def __init__(self, rows, hclass: HypothesisClass, h_star: Hypothesis) -> None:
        rows = sorted(
            ((p, lab if isinstance(lab, Label) else Label.from_code(lab), Fraction(m))
             for p, lab, m in rows),
            key=lambda r: (r[0], r[1].code),
        )
        if not rows:
            raise StructuralError("support must be nonempty")
        masses = tuple(m for _, _, m in rows)
        if any(m <= 0 for m in masses):
            raise StructuralError("masses must be positive")
        if any(m.denominator > MAX_MASS_DENOMINATOR for m in masses):
            raise StructuralError(f"mass denominators must not exceed {MAX_MASS_DENOMINATOR}")
        if sum(masses) != 1:
            raise StructuralError("masses must sum to exactly 1")
        seen = set()
        for p, lab, _ in rows:
            key = (p, lab.code)
            if key in seen:
                raise StructuralError(f"duplicate support row {key}")
            seen.add(key)

        self.support = tuple(rows)
        self.hclass = hclass
        self.h_star = h_star
        dtype = np.int64 if isinstance(hclass.domain, FiniteDomain) else np.float64
        self.points = np.asarray([p for p, _, _ in rows], dtype=dtype)
        self.points.setflags(write=False)
        self.label_codes = np.asarray([lab.code for _, lab, _ in rows], dtype=np.int8)
        self.label_codes.setflags(write=False)
        self.masses = masses
        hclass.domain.validate_points(self.points)

        self.tau = exact_error(h_star, self)
        best = _class_optimal_error(hclass, self)
        if best != self.tau:
            raise StructuralError(
                f"h_star is not class-optimal: tau={self.tau} but the class attains {best}"
            )
        self._cdf = np.cumsum([float(m) for m in masses])

    def __len__(self) -> int:
        return len(self.support)

    def sample(self, m: int, seed: SeedSpec) -> LabeledSequence:
        """``m`` i.i.d. draws by inverse CDF over the sorted support order."""
        if m < 0:
            raise StructuralError("sample size must have m >= 0")
        rng = seed.generator()
        u = rng.random(m)
        idx = np.searchsorted(self._cdf, u, side="right")
        idx = np.minimum(idx, len(self.support) - 1)
        return LabeledSequence(self.points[idx], self.label_codes[idx], self.domain)

    @property
    def domain(self):
        return self.hclass.domain

    def to_json(self) -> str:
        finite = isinstance(self.domain, FiniteDomain)
        payload = {
            "support": [
                {
                    "point": int(p) if finite else float(p),
                    "label": lab.code,
                    "mass_num": m.numerator,
                    "mass_den": m.denominator,
                }
                for p, lab, m in self.support
            ],
            "class": _class_binding(self.hclass),
            "h_star": hypothesis_params(self.h_star),
            "tau_num": self.tau.numerator,
            "tau_den": self.tau.denominator,
        }
        return json.dumps(payload, sort_keys=True)


def _class_binding(hclass: HypothesisClass) -> dict:
    if isinstance(hclass, FiniteClass):
        return {
            "kind": "finite",
            "labels": hclass.labels_matrix.tolist(),
            "vc_dim": hclass.vc_dim,
        }
    if isinstance(hclass, ThresholdClass):
        return {"kind": "threshold", "both_orientations": hclass.both_orientations}
    if isinstance(hclass, IntervalClass):
        return {"kind": "interval"}
    raise StructuralError(f"unknown class {type(hclass)!r}")


def exact_error(predictor, dist: FiniteDistribution) -> Fraction:
    """Exact true error of any total classifier under ``dist``.

    ``predictor`` may be a hypothesis (``predict``) or a trained classifier
    (``predict_codes``).
    """
    codes = _predict_codes(predictor, dist.points)
    total = Fraction(0)
    for pred, code, mass in zip(codes.tolist(), dist.label_codes.tolist(), dist.masses):
        if pred != code:
            total += mass
    return total


def _predict_codes(predictor, points: np.ndarray) -> np.ndarray:
    if hasattr(predictor, "predict_codes"):
        return np.asarray(predictor.predict_codes(points), dtype=np.int8)
    return np.asarray(predictor.predict(points), dtype=np.int8)


# ---------------------------------------------------------------------------
# exact class-optimal error (tau verification)


def _class_optimal_error(hclass: HypothesisClass, dist: FiniteDistribution) -> Fraction:
    num, den = _mass_numerators(dist.masses)
    if isinstance(hclass, FiniteClass):
        wrong = hclass.labels_matrix[:, dist.points] != dist.label_codes
        err_nums = wrong @ num
        return Fraction(int(err_nums.min()), den)
    if isinstance(hclass, ThresholdClass):
        return _scan_threshold_optimum(hclass, dist, num, den)
    if isinstance(hclass, IntervalClass):
        return _scan_interval_optimum(dist, num, den)
    raise StructuralError(f"unknown class {type(hclass)!r}")


def _mass_numerators(masses: Sequence[Fraction]) -> Tuple[np.ndarray, int]:
    den = 1
    for m in masses:
        den = den * m.denominator // np.gcd(den, m.denominator)
    num = np.asarray([m.numerator * (den // m.denominator) for m in masses], dtype=np.int64)
    return num, int(den)


def _scan_threshold_optimum(
    hclass: ThresholdClass, dist: FiniteDistribution, num: np.ndarray, den: int
) -> Fraction:
    values = np.unique(dist.points)
    plus_mass = np.zeros(values.size, dtype=np.int64)
    minus_mass = np.zeros(values.size, dtype=np.int64)
    pos = np.searchsorted(values, dist.points)
    for i, code in enumerate(dist.label_codes.tolist()):
        if code == 1:
            plus_mass[pos[i]] += num[i]
        else:
            minus_mass[pos[i]] += num[i]
    plus_prefix = np.concatenate([[0], np.cumsum(plus_mass)])
    minus_prefix = np.concatenate([[0], np.cumsum(minus_mass)])
    err_plus = plus_prefix + (minus_prefix[-1] - minus_prefix)
    best = int(err_plus.min())
    if hclass.both_orientations:
        err_minus = minus_prefix + (plus_prefix[-1] - plus_prefix)
        best = min(best, int(err_minus.min()))
    return Fraction(best, den)


def _scan_interval_optimum(dist: FiniteDistribution, num: np.ndarray, den: int) -> Fraction:
    values = np.unique(dist.points)
    gain_at = np.zeros(values.size, dtype=np.int64)
    pos = np.searchsorted(values, dist.points)
    plus_total = 0
    for i, code in enumerate(dist.label_codes.tolist()):
        gain_at[pos[i]] += num[i] if code == 1 else -num[i]
        if code == 1:
            plus_total += int(num[i])
    gain = np.concatenate([[0], np.cumsum(gain_at)])
    # best interval maximizes gain[j] - gain[i] over i <= j
    best_gain = int(np.max(np.maximum.accumulate(gain[::-1])[::-1] - gain))
    return Fraction(plus_total - best_gain, den)


# ---------------------------------------------------------------------------
# generators


def make_rcn(
    hclass: HypothesisClass,
    h_star: Hypothesis,
    marginal: Sequence[Tuple[object, Fraction]],
    eta: Fraction,
) -> FiniteDistribution:
    """Random classification noise around a class hypothesis.

    Each marginal point carries ``mass*(1-eta)`` on ``h_star``'s label and
    ``mass*eta`` on the flip, so the optimal error is exactly ``eta`` and
    ``h_star`` is the Bayes classifier.
    """
    eta = Fraction(eta)
    if not 0 <= eta < Fraction(1, 2):
        raise ConfigError("eta must lie in [0, 1/2) so h_star stays optimal")
    rows = []
    pts = np.asarray([p for p, _ in marginal])
    hclass.domain.validate_points(
        pts if isinstance(hclass.domain, ScalarDomain) else pts.astype(np.int64)
    )
    star_codes = h_star.predict(pts)
    for (p, mass), code in zip(marginal, star_codes.tolist()):
        mass = Fraction(mass)
        clean = Label.from_code(code)
        rows.append((p, clean, mass * (1 - eta)))
        if eta > 0:
            rows.append((p, clean.flipped(), mass * eta))
    return FiniteDistribution(rows, hclass, h_star)


def make_hard_realizable(n: int, p: Fraction) -> Tuple[FiniteDistribution, FiniteClass]:
    """Realizable instance on which adversarial ERM tie-breaking is costly.

    One heavy point carries mass ``1-p`` with the label fixed to +1 across
    the whole class; the remaining ``n-1`` light points split mass ``p`` by
    repeated halving (light ``j`` takes half of what is left, the last light
    takes the remainder), so the instance keeps a not-yet-learned scale at
    every training-set size instead of being memorized all at once. The class
    consists of all labelings of the light points (size ``2**(n-1)``); the
    all-plus hypothesis is index 0 and is the unique zero-error hypothesis.
    """
    if n < 2:
        raise ConfigError("need n >= 2")
    p = Fraction(p)
    if not 0 < p < 1:
        raise ConfigError("need 0 < p < 1")
    n_lights = n - 1
    n_hyp = 2 ** n_lights
    matrix = np.ones((n_hyp, n), dtype=np.int8)
    for b in range(n_hyp):
        for j in range(n_lights):
            if (b >> j) & 1:
                matrix[b, 1 + j] = -1
    hclass = FiniteClass(matrix, vc_dim=n_lights if n > 16 else None)
    h_star = hclass.hypothesis(0)

    rows = [(0, Label.PLUS, 1 - p)]
    remaining = p
    for j in range(n_lights):
        share = remaining / 2 if j < n_lights - 1 else remaining
        rows.append((1 + j, Label.PLUS, share))
        remaining -= share
    return FiniteDistribution(rows, hclass, h_star), hclass


def make_two_point(p: Fraction) -> Tuple[FiniteDistribution, ThresholdClass]:
    """Two scalar points with masses ``(1-p, p)``, separable by a threshold."""
    p = Fraction(p)
    if not 0 < p < 1:
        raise ConfigError("need 0 < p < 1")
    hclass = ThresholdClass(both_orientations=True)
    h_star = hclass.hypothesis(0.5, orientation=1)
    rows = [(0.0, Label.MINUS, 1 - p), (1.0, Label.PLUS, p)]
    return FiniteDistribution(rows, hclass, h_star), hclass


@dataclass(frozen=True)
class DistributionSpec:
    """Declarative recipe for a distribution, as used by plans and configs."""

    kind: str
    params: dict

    def build(self) -> Tuple[FiniteDistribution, HypothesisClass]:
        if self.kind == "rcn":
            n_points = int(self.params.get("n_points", 8))
            eta = Fraction(*self.params["eta"]) if isinstance(self.params["eta"], (list, tuple)) else Fraction(self.params["eta"])
            cut = int(self.params.get("threshold_cut", n_points // 2))
            both = bool(self.params.get("both_orientations", True))
            hclass = ThresholdClass(both_orientations=both)
            h_star = hclass.hypothesis(cut + 0.5, orientation=1)
            marginal = [(float(i), Fraction(1, n_points)) for i in range(1, n_points + 1)]
            return make_rcn(hclass, h_star, marginal, eta), hclass
        if self.kind == "hard_realizable":
            p = self.params["p"]
            p = Fraction(*p) if isinstance(p, (list, tuple)) else Fraction(p)
            return make_hard_realizable(int(self.params["n"]), p)
        if self.kind == "two_point":
            p = self.params["p"]
            p = Fraction(*p) if isinstance(p, (list, tuple)) else Fraction(p)
            return make_two_point(p)
        raise ConfigError(f"unknown distribution kind {self.kind!r}")
