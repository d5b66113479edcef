"""Four-outcome joint X/Y measurements on a qubit.

The measurement family is parameterized by a visibility triple
``(vx, vy, vz)`` and consists of the four operators

    element(x, y) = (I + x*vx*X + y*vy*Y + x*y*vz*Z) / 4,   x, y in {+1, -1}.

``vx`` and ``vy`` are the resolutions seen by eigenstate inputs; ``vz`` has
no effect on eigenstate statistics and only shows up in the correlations
between the two outcomes. Positivity of the elements is equivalent to
``vx^2 + vy^2 + vz^2 <= 1``; on the boundary each element is half a rank-1
projector.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .qubit import (
    ATOL_ALGEBRA,
    ensure_density_matrix,
    ensure_sign,
    identity,
    pauli,
    tensor,
    trace_product,
)

# Fixed outcome orderings, +1 before -1; also the category order used by the
# inverse-CDF sampler in `simulate`.
OUTCOMES4: tuple[tuple[int, int], ...] = tuple(itertools.product((+1, -1), repeat=2))
OUTCOMES16: tuple[tuple[int, int, int, int], ...] = tuple(itertools.product((+1, -1), repeat=4))

# Flip patterns (rx, ry): rx = 0 means the X outcomes of a pair show the
# expected anti-correlation, rx = 1 means they do not; same for ry.
PATTERNS: tuple[tuple[int, int], ...] = ((0, 0), (0, 1), (1, 0), (1, 1))


class PositivityError(ValueError):
    """Visibility triple outside the positive measurement family."""


@dataclass(frozen=True)
class VisibilityTriple:
    """Measurement parameters (vx, vy, vz) with vx, vy in [0,1], vz in [-1,1]."""

    vx: float
    vy: float
    vz: float

    def __post_init__(self) -> None:
        for name, value in (("vx", self.vx), ("vy", self.vy), ("vz", self.vz)):
            if not np.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if not 0.0 <= self.vx <= 1.0:
            raise ValueError(f"vx must lie in [0, 1], got {self.vx!r}")
        if not 0.0 <= self.vy <= 1.0:
            raise ValueError(f"vy must lie in [0, 1], got {self.vy!r}")
        if not -1.0 <= self.vz <= 1.0:
            raise ValueError(f"vz must lie in [-1, 1], got {self.vz!r}")
        if self.norm_squared > 1.0 + ATOL_ALGEBRA:
            raise PositivityError(
                f"vx^2 + vy^2 + vz^2 = {self.norm_squared!r} exceeds 1; "
                "no positive measurement with these visibilities exists"
            )

    @property
    def norm_squared(self) -> float:
        return self.vx ** 2 + self.vy ** 2 + self.vz ** 2


@dataclass(frozen=True)
class PatternStats:
    """Per-outcome probabilities of the four pair flip patterns.

    ``e[(rx, ry)]`` is the probability of one specific outcome combination
    showing pattern ``(rx, ry)``; since four outcome combinations share each
    pattern, the four entries sum to 1/4. ``total_shots`` is 0 for exact
    tables, in which case every stderr is 0.
    """

    e: Mapping[tuple[int, int], float]
    stderr: Mapping[tuple[int, int], float]
    total_shots: int

    def __post_init__(self) -> None:
        if set(self.e) != set(PATTERNS) or set(self.stderr) != set(PATTERNS):
            raise ValueError("pattern stats must cover exactly the four flip patterns")
        if self.total_shots < 0:
            raise ValueError("total_shots must be non-negative")
        total = 0.0
        for r in PATTERNS:
            value = self.e[r]
            if not np.isfinite(value) or not np.isfinite(self.stderr[r]):
                raise ValueError("pattern stats must be finite")
            if self.stderr[r] < 0.0:
                raise ValueError("stderr must be non-negative")
            # Exact tables are nonnegative by construction; sampled tables may
            # dip below zero only through source-noise correction.
            floor = -ATOL_ALGEBRA if self.total_shots == 0 else -0.25
            if not floor <= value <= 1.0 + ATOL_ALGEBRA:
                raise ValueError(f"pattern probability e{r} = {value!r} out of range")
            total += value
        if abs(total - 0.25) > 1e-9:
            raise ValueError(f"pattern probabilities must sum to 1/4, got {total!r}")


@dataclass(frozen=True)
class JointPovm:
    """The four measurement operators keyed by outcome (x, y)."""

    visibilities: VisibilityTriple
    elements: Mapping[tuple[int, int], np.ndarray]

    def element(self, x: int, y: int) -> np.ndarray:
        return self.elements[(ensure_sign(x, "x"), ensure_sign(y, "y"))]


def build_povm(v: VisibilityTriple) -> JointPovm:
    """Construct the four-outcome joint measurement for a visibility triple.

    Raises ``PositivityError`` (via ``VisibilityTriple``) when
    ``vx^2 + vy^2 + vz^2 > 1``; positivity is checked algebraically, each
    element's smallest eigenvalue being ``(1 - sqrt(vx^2+vy^2+vz^2)) / 4``.
    """
    if not isinstance(v, VisibilityTriple):
        v = VisibilityTriple(*v)
    eye = identity(2)
    sx, sy, sz = pauli("X"), pauli("Y"), pauli("Z")
    elements = {
        (x, y): (eye + x * v.vx * sx + y * v.vy * sy + x * y * v.vz * sz) / 4.0
        for x, y in OUTCOMES4
    }
    return JointPovm(visibilities=v, elements=elements)


def _real_prob(value: complex, what: str) -> float:
    if abs(value.imag) > ATOL_ALGEBRA:
        raise ValueError(f"{what} has a non-negligible imaginary part: {value!r}")
    if not -ATOL_ALGEBRA <= value.real <= 1.0 + ATOL_ALGEBRA:
        raise ValueError(f"{what} = {value.real!r} out of [0, 1]")
    return value.real


def outcome_probs(povm: JointPovm, rho) -> dict[tuple[int, int], float]:
    """Outcome probabilities ``Tr(element(x,y) @ rho)`` for a qubit state."""
    rho = ensure_density_matrix(rho, dim=2)
    probs = {
        (x, y): _real_prob(trace_product(povm.elements[(x, y)], rho), f"P{(x, y)}")
        for x, y in OUTCOMES4
    }
    total = sum(probs.values())
    if abs(total - 1.0) > ATOL_ALGEBRA:
        raise ValueError(f"outcome probabilities do not sum to 1: {total!r}")
    return probs


def pair_outcome_probs(
    povm1: JointPovm, povm2: JointPovm, rho4
) -> dict[tuple[int, int, int, int], float]:
    """Joint outcome probabilities for independent measurements on a pair.

    Entry ``(x1, y1, x2, y2)`` is ``Tr((element1(x1,y1) (x) element2(x2,y2)) @ rho4)``.
    The two measurements may differ; the pattern-based estimators in
    `analysis` assume they are identical.
    """
    rho4 = ensure_density_matrix(rho4, dim=4)
    probs = {}
    for x1, y1, x2, y2 in OUTCOMES16:
        op = tensor(povm1.elements[(x1, y1)], povm2.elements[(x2, y2)])
        probs[(x1, y1, x2, y2)] = _real_prob(
            trace_product(op, rho4), f"P{(x1, y1, x2, y2)}"
        )
    total = sum(probs.values())
    if abs(total - 1.0) > ATOL_ALGEBRA:
        raise ValueError(f"pair probabilities do not sum to 1: {total!r}")
    return probs


def exact_pattern_probs(v: VisibilityTriple) -> PatternStats:
    """Exact flip-pattern probabilities for identical measurements on a singlet pair.

    Closed forms (per outcome combination):

        e(0,0) = (1 + vx^2 + vy^2 - vz^2) / 16
        e(0,1) = (1 + vx^2 - vy^2 + vz^2) / 16
        e(1,0) = (1 - vx^2 + vy^2 + vz^2) / 16
        e(1,1) = (1 - vx^2 - vy^2 - vz^2) / 16
    """
    if not isinstance(v, VisibilityTriple):
        v = VisibilityTriple(*v)
    x2, y2, z2 = v.vx ** 2, v.vy ** 2, v.vz ** 2
    e = {
        (0, 0): (1.0 + x2 + y2 - z2) / 16.0,
        (0, 1): (1.0 + x2 - y2 + z2) / 16.0,
        (1, 0): (1.0 - x2 + y2 + z2) / 16.0,
        (1, 1): (1.0 - x2 - y2 - z2) / 16.0,
    }
    return PatternStats(e=e, stderr={r: 0.0 for r in PATTERNS}, total_shots=0)


def ideal_operator(sx: int, sy: int) -> np.ndarray:
    """Ordered product of the X and Y projectors, ``(I + sx*X)(I + sy*Y) / 4``.

    This is the (non-Hermitian) vz = i member of the measurement family; its
    traces against states give the Kirkwood-Dirac quasi-probabilities in
    `kirkwood`. The Hermiticity defect is ``op - op^dagger = i*sx*sy*Z/2``.
    """
    sx = ensure_sign(sx, "sx")
    sy = ensure_sign(sy, "sy")
    eye = identity(2)
    return (eye + sx * pauli("X")) @ (eye + sy * pauli("Y")) / 4.0
