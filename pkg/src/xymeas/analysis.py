"""Estimation pipeline: visibilities, pattern probabilities, and the error correlation.

Eigenstate runs determine the resolutions ``vx`` and ``vy``. Pair runs on a
singlet source determine the flip-pattern probabilities ``e(rx, ry)``, whose
three signed sums recover ``vx^2``, ``vy^2``, and the squared error
correlation ``c^2``:

    vx^2 = 4 * (e(0,0) + e(0,1) - e(1,0) - e(1,1))
    vy^2 = 4 * (e(0,0) - e(0,1) + e(1,0) - e(1,1))
    c^2  = 4 * (e(0,0) - e(0,1) - e(1,0) + e(1,1))

For any measurement in the positive family, ``c^2 = -vz^2 <= 0``: the error
correlation is imaginary, ``c = i*vz`` up to a sign that pair data cannot
resolve. Classical measurement-error models (real non-negative flip weights)
instead force ``c^2 >= 0``; equivalently, the statistic
``s = e(0,1) + e(1,0) - e(0,0) - e(1,1)`` is ``vz^2 / 4 >= 0`` for every
quantum measurement and ``<= 0`` for every classical model.

Standard errors use plain binomial/multinomial propagation. Zero-count
pattern cells get the rule-of-three upper bound ``3/N`` in place of an
estimated binomial spread.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .povm import OUTCOMES4, PATTERNS, PatternStats
from .qubit import ATOL_ALGEBRA, ensure_axis
from .simulate import OutcomeCounts4, PairCounts16

# Verdict threshold: an estimate within 3 standard errors of the classical
# region counts as consistent with a classical error model.
CLASSICAL_SIGMA = 3.0


@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float

    def __post_init__(self) -> None:
        if not np.isfinite(self.value) or not np.isfinite(self.stderr):
            raise ValueError("estimate must be finite")
        if self.stderr < 0.0:
            raise ValueError("stderr must be non-negative")


@dataclass(frozen=True)
class VisibilityEstimate:
    value: float
    stderr: float
    source: str  # "eigenstate-run", "pair-run", or "exact"

    def __post_init__(self) -> None:
        if self.stderr < 0.0:
            raise ValueError("stderr must be non-negative")
        if self.source not in ("eigenstate-run", "pair-run", "exact"):
            raise ValueError(f"unknown estimate source {self.source!r}")


@dataclass(frozen=True)
class CorrelationEstimate:
    """Squared error correlation with its non-classicality verdict.

    ``c_squared`` may be negative; only its square is observable, so no sign
    of the correlation itself is ever reported. ``vz_magnitude`` is
    ``sqrt(max(-c_squared, 0))`` and ``classical`` is True when ``c_squared``
    is within ``CLASSICAL_SIGMA`` standard errors of the classical region.
    """

    c_squared: float
    stderr: float
    vz_magnitude: float
    classical: bool

    def __post_init__(self) -> None:
        if self.stderr < 0.0 or self.vz_magnitude < 0.0:
            raise ValueError("stderr and vz_magnitude must be non-negative")


@dataclass(frozen=True)
class ErrorModel:
    """Complex quasi-probability weights over the four flip patterns.

    ``weights[(rx, ry)]`` is the (quasi-)probability that the measurement
    flips the X outcome iff ``rx = 1`` and the Y outcome iff ``ry = 1``.
    Normalization to 1 is enforced; weights are complex because quantum
    measurements require an imaginary correlation part. Physical models have
    real signed sums for vx and vy, which the consumers below check where
    they rely on it.
    """

    weights: Mapping[tuple[int, int], complex]

    def __post_init__(self) -> None:
        if set(self.weights) != set(PATTERNS):
            raise ValueError("error model must cover exactly the four flip patterns")
        values = np.array([complex(self.weights[r]) for r in PATTERNS])
        if not np.all(np.isfinite(values.view(float))):
            raise ValueError("error model weights must be finite")
        total = complex(values.sum())
        if abs(total - 1.0) > ATOL_ALGEBRA:
            raise ValueError(f"error model weights must sum to 1, got {total!r}")


def _binomial_stderr(p: float, total: float) -> float:
    return 2.0 * np.sqrt(max(p * (1.0 - p), 0.0) / total)


def estimate_vx(counts: OutcomeCounts4, source: str = "eigenstate-run") -> VisibilityEstimate:
    """Resolution of the X outcome from an X-eigenstate run.

    ``(correct-x count - wrong-x count) / total`` summed over both y outcomes.
    """
    if ensure_axis(counts.input_axis) != "X":
        raise ValueError(f"estimate_vx needs an X-eigenstate run, got axis {counts.input_axis!r}")
    if counts.total < 1:
        raise ValueError("estimate_vx needs at least one shot")
    correct = sum(counts.counts[(x, y)] for x, y in OUTCOMES4 if x == counts.input_value)
    p = correct / counts.total
    return VisibilityEstimate(
        value=2.0 * p - 1.0, stderr=_binomial_stderr(p, counts.total), source=source
    )


def estimate_vy(counts: OutcomeCounts4, source: str = "eigenstate-run") -> VisibilityEstimate:
    """Mirror of `estimate_vx` for Y-eigenstate runs."""
    if ensure_axis(counts.input_axis) != "Y":
        raise ValueError(f"estimate_vy needs a Y-eigenstate run, got axis {counts.input_axis!r}")
    if counts.total < 1:
        raise ValueError("estimate_vy needs at least one shot")
    correct = sum(counts.counts[(x, y)] for x, y in OUTCOMES4 if y == counts.input_value)
    p = correct / counts.total
    return VisibilityEstimate(
        value=2.0 * p - 1.0, stderr=_binomial_stderr(p, counts.total), source=source
    )


def pattern_of(x1: int, y1: int, x2: int, y2: int) -> tuple[int, int]:
    """Flip pattern of a pair outcome: 0 where the singlet anti-correlation holds."""
    return (0 if x1 == -x2 else 1, 0 if y1 == -y2 else 1)


def collapse_pair_counts(counts: PairCounts16) -> PatternStats:
    """Reduce 16 pair-outcome counts to the four per-outcome pattern probabilities.

    Four outcome combinations share each pattern, so ``e(r)`` is the pattern
    class count divided by ``4 * total``; exact probability tables fed
    through `PairCounts16` (fractional counts, total 1) line up with
    `povm.exact_pattern_probs` and come back with ``total_shots = 0`` and
    zero standard errors.
    """
    if counts.total <= 0:
        raise ValueError("collapse_pair_counts needs at least one shot")
    sampled = float(counts.total).is_integer() and all(
        float(n).is_integer() for n in counts.counts.values()
    )
    class_counts = {r: 0.0 for r in PATTERNS}
    for outcome, n in counts.counts.items():
        class_counts[pattern_of(*outcome)] += n
    e = {}
    stderr = {}
    for r in PATTERNS:
        f = min(max(class_counts[r] / counts.total, 0.0), 1.0)
        e[r] = f / 4.0
        if not sampled:
            stderr[r] = 0.0
        elif f == 0.0:
            stderr[r] = (3.0 / counts.total) / 4.0  # rule-of-three upper bound
        else:
            stderr[r] = np.sqrt(f * (1.0 - f) / counts.total) / 4.0
    return PatternStats(e=e, stderr=stderr, total_shots=int(counts.total) if sampled else 0)


def _signed_pattern_sum(stats: PatternStats, signs: Mapping[tuple[int, int], float]) -> Estimate:
    value = 4.0 * sum(signs[r] * stats.e[r] for r in PATTERNS)
    stderr = 4.0 * np.sqrt(sum(stats.stderr[r] ** 2 for r in PATTERNS))
    return Estimate(value=value, stderr=stderr)


def vsquared_from_patterns(stats: PatternStats) -> tuple[Estimate, Estimate]:
    """Squared visibilities from pattern probabilities, with propagated errors."""
    vx2 = _signed_pattern_sum(stats, {(0, 0): 1, (0, 1): 1, (1, 0): -1, (1, 1): -1})
    vy2 = _signed_pattern_sum(stats, {(0, 0): 1, (0, 1): -1, (1, 0): 1, (1, 1): -1})
    return vx2, vy2


def csquared_from_patterns(stats: PatternStats) -> CorrelationEstimate:
    """Squared error correlation from pattern probabilities.

    Every measurement in the positive family gives exactly ``-vz^2``; a
    significantly negative estimate is the non-classical signature.
    """
    c2 = _signed_pattern_sum(stats, {(0, 0): 1, (0, 1): -1, (1, 0): -1, (1, 1): 1})
    # ATOL_ALGEBRA floor keeps exact zero-stderr inputs with rounding dust
    # below zero from being flagged non-classical
    return CorrelationEstimate(
        c_squared=c2.value,
        stderr=c2.stderr,
        vz_magnitude=float(np.sqrt(max(-c2.value, 0.0))),
        classical=bool(c2.value >= -(CLASSICAL_SIGMA * c2.stderr + ATOL_ALGEBRA)),
    )


def classicality_statistic(stats: PatternStats) -> float:
    """``e(0,1) + e(1,0) - e(0,0) - e(1,1)``; > 0 is impossible classically."""
    return stats.e[(0, 1)] + stats.e[(1, 0)] - stats.e[(0, 0)] - stats.e[(1, 1)]


def correct_for_source_noise(stats: PatternStats, p: float) -> PatternStats:
    """Undo isotropic source noise of known strength on pattern probabilities.

    A source with werner parameter ``p`` mixes the singlet pattern table with
    the uniform 1/16 background: ``e_noisy = p * e_pure + (1 - p) / 16``.
    Inverting divides every pattern contrast by ``p`` and scales standard
    errors by ``1/p``. Model-dependent: valid only for isotropic noise with a
    correctly known ``p``. Corrected sampled entries may be slightly
    negative where the true probability is near zero.
    """
    if not 0.0 < p <= 1.0:
        raise ValueError(f"source parameter must lie in (0, 1], got {p!r}")
    e = {r: (stats.e[r] - (1.0 - p) / 16.0) / p for r in PATTERNS}
    stderr = {r: stats.stderr[r] / p for r in PATTERNS}
    return PatternStats(e=e, stderr=stderr, total_shots=stats.total_shots)


def error_model_from_visibilities(vx: complex, vy: complex, c: complex) -> ErrorModel:
    """Flip-pattern weights with the given signed sums.

    ``weights(rx, ry) = (1 + (-1)^rx * vx + (-1)^ry * vy + (-1)^(rx+ry) * c) / 4``.
    Exact inverse of `visibilities_from_error_model`.
    """
    weights = {
        (rx, ry): (
            1.0
            + (-1.0) ** rx * complex(vx)
            + (-1.0) ** ry * complex(vy)
            + (-1.0) ** (rx + ry) * complex(c)
        )
        / 4.0
        for rx, ry in PATTERNS
    }
    return ErrorModel(weights=weights)


def visibilities_from_error_model(m: ErrorModel) -> tuple[complex, complex, complex]:
    """The three signed sums (vx, vy, c) of an error model's weights."""
    w = m.weights
    vx = w[(0, 0)] + w[(0, 1)] - w[(1, 0)] - w[(1, 1)]
    vy = w[(0, 0)] - w[(0, 1)] + w[(1, 0)] - w[(1, 1)]
    c = w[(0, 0)] - w[(0, 1)] - w[(1, 0)] + w[(1, 1)]
    return complex(vx), complex(vy), complex(c)


def eigenstate_probs_from_error_model(m: ErrorModel, axis: str) -> dict[tuple[int, int], float]:
    """Predicted outcome table for a +1 eigenstate input of the given axis.

    Only the no-flip/flip marginals of the weights enter, so the correlation
    part drops out. Complex or out-of-range marginals signal a model that is
    unphysical for this use and are rejected.
    """
    axis = ensure_axis(axis)
    if axis not in ("X", "Y"):
        raise ValueError("eigenstate predictions exist for axis X or Y only")
    w = m.weights
    if axis == "X":
        keep = w[(0, 0)] + w[(0, 1)]
        flip = w[(1, 0)] + w[(1, 1)]
    else:
        keep = w[(0, 0)] + w[(1, 0)]
        flip = w[(0, 1)] + w[(1, 1)]
    marginals = []
    for name, value in (("no-flip", keep), ("flip", flip)):
        value = complex(value)
        if abs(value.imag) > 1e-10:
            raise ValueError(f"{name} marginal is complex: {value!r}")
        if not -ATOL_ALGEBRA <= value.real <= 1.0 + ATOL_ALGEBRA:
            raise ValueError(f"{name} marginal out of [0, 1]: {value.real!r}")
        marginals.append(min(max(value.real, 0.0), 1.0))
    keep_p, flip_p = marginals
    table = {}
    for x, y in OUTCOMES4:
        correct = (x == +1) if axis == "X" else (y == +1)
        table[(x, y)] = (keep_p if correct else flip_p) / 2.0
    return table


def pattern_quasiprobs(m: ErrorModel) -> dict[tuple[int, int], complex]:
    """XOR self-convolution ``(1/4) * sum_s weights(s) * weights(s xor r)``.

    For a normalized model these complex values satisfy, for each of the
    four sign characters chi, ``4 * sum_r chi(r) e(r) = (sum_s chi(s) w(s))^2``.
    """
    w = m.weights
    e = {}
    for rx, ry in PATTERNS:
        acc = 0.0 + 0.0j
        for sx, sy in PATTERNS:
            acc += complex(w[(sx, sy)]) * complex(w[(sx ^ rx, sy ^ ry)])
        e[(rx, ry)] = acc / 4.0
    return e


def predicted_pattern_probs(m: ErrorModel) -> PatternStats:
    """Pattern probabilities predicted for identical measurements on a singlet pair.

    The XOR self-convolution of `pattern_quasiprobs`, with entries required
    to come out real and non-negative (within 1e-10, then clamped); a
    materially complex or negative entry marks the model as inconsistent
    with pair statistics.
    """
    e = {}
    for r, value in pattern_quasiprobs(m).items():
        if abs(value.imag) > 1e-10:
            raise ValueError(f"predicted pattern e{r} is complex: {value!r}")
        if value.real < -1e-10:
            raise ValueError(f"predicted pattern e{r} is negative: {value.real!r}")
        e[r] = max(value.real, 0.0)
    return PatternStats(e=e, stderr={r: 0.0 for r in PATTERNS}, total_shots=0)
