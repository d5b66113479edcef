"""Seeded Monte-Carlo simulation of eigenstate and entangled-pair runs.

Determinism contract
--------------------
All randomness comes from one 64-bit seed. Shots are partitioned into fixed
blocks of ``BLOCK_SHOTS``; block ``i`` draws from the counter-based
``numpy.random.Philox`` generator keyed with the seed and jumped ``i`` times
(``Philox(key=seed).jumped(i)``). Block boundaries depend only on the shot
count, never on the worker count, and block results are merged by addition,
so serial and parallel executions produce identical counts.

Within a block the draw order is fixed: when flip randomization is active,
first one uniform per shot for the flip coin, then one uniform per shot for
the outcome; otherwise only the outcome uniforms. Outcomes are drawn by
inverse CDF over the fixed category order ``OUTCOMES4`` / ``OUTCOMES16``
(+1 before -1).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .povm import OUTCOMES4, OUTCOMES16, VisibilityTriple, build_povm, outcome_probs, pair_outcome_probs
from .qubit import density, eigenstate, ensure_axis, ensure_sign, identity, singlet

BLOCK_SHOTS = 1 << 16

RNG_ID = "numpy.random.Philox keyed with the seed; block i uses .jumped(i)"

# Index map realizing (x, y) -> (-x, -y) in the OUTCOMES4 order.
_NEGATE_BOTH4 = np.array(
    [OUTCOMES4.index((-x, -y)) for x, y in OUTCOMES4], dtype=np.intp
)


@dataclass(frozen=True)
class ExperimentConfig:
    """Parameters of one simulated run.

    ``randomize_flips`` applies to eigenstate runs only: each shot flips the
    input eigenvalue with probability 1/2 and the recorded outcome pair is
    negated back, so counts are reported in the frame of the nominal input.
    ``werner_p`` sets the pair source, ``p = 1`` being a perfect singlet.
    """

    visibilities: VisibilityTriple
    shots: int
    seed: int
    randomize_flips: bool = False
    werner_p: float = 1.0

    def __post_init__(self) -> None:
        if self.shots < 1:
            raise ValueError(f"shots must be >= 1, got {self.shots!r}")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if not 0.0 <= self.werner_p <= 1.0:
            raise ValueError(f"werner_p must lie in [0, 1], got {self.werner_p!r}")


@dataclass(frozen=True)
class OutcomeCounts4:
    """Outcome counts of an eigenstate run, keyed by (x, y).

    Simulated runs hold integer counts; exact probability tables ride
    through the same type with ``total = 1.0``.
    """

    counts: Mapping[tuple[int, int], float]
    total: float
    input_axis: str
    input_value: int

    def __post_init__(self) -> None:
        if set(self.counts) != set(OUTCOMES4):
            raise ValueError("counts must cover exactly the four outcomes")
        # rounding dust below zero tolerated for exact tables
        if any(c < -1e-12 for c in self.counts.values()):
            raise ValueError("counts must be non-negative")
        if abs(sum(self.counts.values()) - self.total) > 1e-9:
            raise ValueError("counts must sum to total")
        ensure_axis(self.input_axis)
        ensure_sign(self.input_value, "input_value")


@dataclass(frozen=True)
class PairCounts16:
    """Outcome counts of a pair run, keyed by (x1, y1, x2, y2).

    Simulated runs hold integer counts; exact probability tables ride
    through the same type with ``total = 1.0``.
    """

    counts: Mapping[tuple[int, int, int, int], float]
    total: float

    def __post_init__(self) -> None:
        if set(self.counts) != set(OUTCOMES16):
            raise ValueError("counts must cover exactly the sixteen outcomes")
        if any(c < -1e-12 for c in self.counts.values()):
            raise ValueError("counts must be non-negative")
        if abs(sum(self.counts.values()) - self.total) > 1e-9:
            raise ValueError("counts must sum to total")


def block_rng(seed: int, block_index: int) -> np.random.Generator:
    """Independent generator for one shot block; see the module docstring."""
    return np.random.Generator(np.random.Philox(key=seed).jumped(block_index))


def _checked_cumulative(probs) -> np.ndarray:
    p = np.asarray(probs, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValueError("probabilities must be a non-empty 1-D sequence")
    if np.min(p) < -1e-12:
        raise ValueError(f"negative probability {np.min(p)!r}")
    p = np.clip(p, 0.0, None)
    total = float(np.sum(p))
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"probabilities sum to {total!r}, expected 1")
    cum = np.cumsum(p / total)
    cum[-1] = 1.0
    return cum


def sample_categorical(probs, rng: np.random.Generator, size: int | None = None):
    """Draw category indices by inverse CDF over the given fixed ordering.

    Probabilities are renormalized internally when their sum deviates from 1
    by less than 1e-9; larger deviations and negative entries are rejected.
    Returns a scalar index when ``size`` is None, else an array of ``size``.
    """
    cum = _checked_cumulative(probs)
    u = rng.random(size if size is not None else 1)
    idx = np.minimum(np.searchsorted(cum, u, side="right"), cum.size - 1)
    return int(idx[0]) if size is None else idx


def werner_state(p: float) -> np.ndarray:
    """Isotropic mixture ``p * singlet + (1 - p) * I/4`` of the pair source."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"werner parameter must lie in [0, 1], got {p!r}")
    return p * density(singlet()) + (1.0 - p) * identity(4) / 4.0


def _accumulate_blocks(
    shots: int,
    num_categories: int,
    block_sampler: Callable[[np.random.Generator, int], np.ndarray],
    seed: int,
    workers: int,
) -> np.ndarray:
    """Sum per-block histograms; identical for any worker count by construction."""

    def one_block(args: tuple[int, int]) -> np.ndarray:
        index, n = args
        idx = block_sampler(block_rng(seed, index), n)
        return np.bincount(idx, minlength=num_categories)

    blocks = []
    start = 0
    index = 0
    while start < shots:
        n = min(BLOCK_SHOTS, shots - start)
        blocks.append((index, n))
        start += n
        index += 1

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            parts = list(executor.map(one_block, blocks))
    else:
        parts = [one_block(b) for b in blocks]
    return np.sum(parts, axis=0)


def run_eigenstate_experiment(
    config: ExperimentConfig, axis: str, value: int, workers: int = 1
) -> OutcomeCounts4:
    """Simulate joint measurements on an X or Y eigenstate input.

    With ``randomize_flips`` enabled, a shot that flips the input samples the
    outcome for the negated eigenvalue and records the negation of both
    outcome bits, which preserves the flip pattern relative to the input;
    returned counts are therefore always in the nominal input frame.
    """
    axis = ensure_axis(axis)
    value = ensure_sign(value)
    if axis == "Z":
        raise ValueError("eigenstate runs accept axis X or Y only")

    povm = build_povm(config.visibilities)
    probs = outcome_probs(povm, density(eigenstate(axis, value)))
    cum_nominal = _checked_cumulative([probs[o] for o in OUTCOMES4])
    if config.randomize_flips:
        flipped = outcome_probs(povm, density(eigenstate(axis, -value)))
        cum_flipped = _checked_cumulative([flipped[o] for o in OUTCOMES4])

    def block_sampler(rng: np.random.Generator, n: int) -> np.ndarray:
        if not config.randomize_flips:
            u = rng.random(n)
            return np.minimum(np.searchsorted(cum_nominal, u, side="right"), 3)
        flips = rng.random(n) < 0.5
        u = rng.random(n)
        idx_nominal = np.minimum(np.searchsorted(cum_nominal, u, side="right"), 3)
        idx_flipped = np.minimum(np.searchsorted(cum_flipped, u, side="right"), 3)
        idx = np.where(flips, idx_flipped, idx_nominal)
        return np.where(flips, _NEGATE_BOTH4[idx], idx)

    hist = _accumulate_blocks(config.shots, 4, block_sampler, config.seed, workers)
    counts = {o: int(hist[i]) for i, o in enumerate(OUTCOMES4)}
    return OutcomeCounts4(
        counts=counts, total=config.shots, input_axis=axis, input_value=value
    )


def run_pair_experiment(config: ExperimentConfig, workers: int = 1) -> PairCounts16:
    """Simulate identical joint measurements on both halves of a pair source."""
    povm = build_povm(config.visibilities)
    probs = pair_outcome_probs(povm, povm, werner_state(config.werner_p))
    cum = _checked_cumulative([probs[o] for o in OUTCOMES16])

    def block_sampler(rng: np.random.Generator, n: int) -> np.ndarray:
        u = rng.random(n)
        return np.minimum(np.searchsorted(cum, u, side="right"), 15)

    hist = _accumulate_blocks(config.shots, 16, block_sampler, config.seed, workers)
    counts = {o: int(hist[i]) for i, o in enumerate(OUTCOMES16)}
    return PairCounts16(counts=counts, total=config.shots)
