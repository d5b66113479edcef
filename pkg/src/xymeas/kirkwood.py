"""Kirkwood-Dirac quasi-probabilities and their reconstruction from joint measurements.

The quasi-probability of a qubit state over joint X/Y outcomes is

    kd(x, y) = <x|y><y|rho|x> = Tr(ideal_operator(x, y) @ rho),

with ``|x>`` the X eigenstates and ``|y>`` the Y eigenstates, i.e. the
ordered-projector convention with the X projector acting first. Its
marginals are the Born probabilities of X and Y; its correlation moment is
imaginary, ``sum_{x,y} x*y*kd(x,y) = i*<Z>``.

Sign convention for the correlation parameter
---------------------------------------------
The error correlation of a measurement with visibilities ``(vx, vy, vz)``
is reported as ``c = i*vz`` (so ``c^2 = -vz^2``). Because the correlation
moment of the quasi-probability is ``i*<Z>`` while the measurement couples
to ``vz*<Z>``, the linear maps between quasi-probabilities and outcome
tables must pair that moment with ``-c``: only then does
``reconstruct_kd(outcome_probs(...), vx, vy, i*vz)`` return
``kd_from_state(rho)``. Both `forward_map` and `reconstruct_kd` use this
pairing, which keeps them exact mutual inverses for every nonzero complex
``c``. (The opposite pairing would correspond to the transposed projector
order, which conjugates every quasi-probability entry.)
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .analysis import ErrorModel, visibilities_from_error_model
from .povm import OUTCOMES4, OUTCOMES16, ideal_operator
from .qubit import (
    ATOL_ALGEBRA,
    ensure_density_matrix,
    eigenstate,
    identity,
    pauli,
    tensor_state,
    trace_product,
)

# Visibilities below this magnitude make the inversion numerically
# meaningless; they are rejected rather than regularized.
SINGULAR_VISIBILITY = 1e-6


class SingularInversionError(ValueError):
    """Reconstruction requested with a vanishing visibility parameter."""

    def __init__(self, parameter: str, value: complex):
        self.parameter = parameter
        super().__init__(
            f"visibility parameter {parameter} = {value!r} is too small to invert "
            f"(threshold {SINGULAR_VISIBILITY})"
        )


@dataclass(frozen=True)
class KDDistribution:
    """Complex quasi-probability over joint outcomes (x, y), x, y in {+1, -1}.

    Entries sum to 1 and both marginals are real.
    """

    entries: Mapping[tuple[int, int], complex]

    def __post_init__(self) -> None:
        if set(self.entries) != set(OUTCOMES4):
            raise ValueError("KD distribution must cover exactly the four outcomes")
        values = np.array([complex(self.entries[o]) for o in OUTCOMES4])
        if not np.all(np.isfinite(values.view(float))):
            raise ValueError("KD entries must be finite")
        total = complex(values.sum())
        if abs(total - 1.0) > ATOL_ALGEBRA:
            raise ValueError(f"KD entries must sum to 1, got {total!r}")
        for x in (+1, -1):
            marginal = self.entries[(x, +1)] + self.entries[(x, -1)]
            if abs(complex(marginal).imag) > ATOL_ALGEBRA:
                raise ValueError(f"x = {x} marginal is not real: {marginal!r}")
        for y in (+1, -1):
            marginal = self.entries[(+1, y)] + self.entries[(-1, y)]
            if abs(complex(marginal).imag) > ATOL_ALGEBRA:
                raise ValueError(f"y = {y} marginal is not real: {marginal!r}")

    def x_marginal(self, x: int) -> float:
        return complex(self.entries[(x, +1)] + self.entries[(x, -1)]).real

    def y_marginal(self, y: int) -> float:
        return complex(self.entries[(+1, y)] + self.entries[(-1, y)]).real


@dataclass(frozen=True)
class PairKDDistribution:
    """Quasi-probability of a two-qubit state over (x1, y1, x2, y2)."""

    entries: Mapping[tuple[int, int, int, int], complex]

    def __post_init__(self) -> None:
        if set(self.entries) != set(OUTCOMES16):
            raise ValueError("pair KD distribution must cover exactly the sixteen outcomes")
        values = np.array([complex(self.entries[o]) for o in OUTCOMES16])
        if not np.all(np.isfinite(values.view(float))):
            raise ValueError("pair KD entries must be finite")
        total = complex(values.sum())
        if abs(total - 1.0) > ATOL_ALGEBRA:
            raise ValueError(f"pair KD entries must sum to 1, got {total!r}")


def kd_from_state(rho) -> KDDistribution:
    """Quasi-probability ``<x|y><y|rho|x>`` of a qubit state."""
    rho = ensure_density_matrix(rho, dim=2)
    entries = {}
    for x, y in OUTCOMES4:
        bra_x = eigenstate("X", x)
        ket_y = eigenstate("Y", y)
        overlap = complex(np.vdot(bra_x, ket_y))
        entries[(x, y)] = overlap * complex(np.vdot(ket_y, rho @ bra_x))
    return KDDistribution(entries=entries)


def kd_pair_from_state(rho4) -> PairKDDistribution:
    """Quasi-probability ``<x1,x2|y1,y2><y1,y2|rho4|x1,x2>`` of a two-qubit state."""
    rho4 = ensure_density_matrix(rho4, dim=4)
    entries = {}
    for x1, y1, x2, y2 in OUTCOMES16:
        ket_x = tensor_state(eigenstate("X", x1), eigenstate("X", x2))
        ket_y = tensor_state(eigenstate("Y", y1), eigenstate("Y", y2))
        overlap = complex(np.vdot(ket_x, ket_y))
        entries[(x1, y1, x2, y2)] = overlap * complex(np.vdot(ket_y, rho4 @ ket_x))
    return PairKDDistribution(entries=entries)


def _check_not_singular(name: str, value: complex) -> complex:
    value = complex(value)
    if abs(value) < SINGULAR_VISIBILITY:
        raise SingularInversionError(name, value)
    return value


def _ensure_prob_table(p: Mapping[tuple[int, int], float]) -> dict[tuple[int, int], float]:
    if set(p) != set(OUTCOMES4):
        raise ValueError("probability table must cover exactly the four outcomes")
    table = {}
    for o in OUTCOMES4:
        value = float(p[o])
        if not np.isfinite(value) or value < -ATOL_ALGEBRA or value > 1.0 + ATOL_ALGEBRA:
            raise ValueError(f"probability P{o} = {value!r} out of range")
        table[o] = value
    total = sum(table.values())
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"probability table sums to {total!r}, expected 1")
    return table


def reconstruct_kd(
    p: Mapping[tuple[int, int], float], vx: float, vy: float, c: complex
) -> KDDistribution:
    """Invert an outcome table of a joint measurement into a quasi-probability.

    ``kd(x, y) = (1/4) * sum_{x', y'} (1 + x*x'/vx + y*y'/vy - x*x'*y*y'/c) * p(x', y')``

    For a table produced by the measurement with visibilities (vx, vy, vz)
    on a state ``rho``, passing ``c = i*vz`` returns ``kd_from_state(rho)``;
    see the module docstring for why the ``1/c`` term carries the minus
    sign. Any nonzero complex ``c`` is accepted so that hypothetical real
    error models can be inverted as well. Visibilities smaller in magnitude
    than ``SINGULAR_VISIBILITY`` raise `SingularInversionError` naming the
    offending parameter.
    """
    table = _ensure_prob_table(p)
    vx = _check_not_singular("vx", vx)
    vy = _check_not_singular("vy", vy)
    c = _check_not_singular("c", c)
    entries = {}
    for x, y in OUTCOMES4:
        acc = 0.0 + 0.0j
        for xp, yp in OUTCOMES4:
            coeff = 1.0 + (x * xp) / vx + (y * yp) / vy - (x * xp * y * yp) / c
            acc += coeff * table[(xp, yp)]
        entries[(x, y)] = acc / 4.0
    return KDDistribution(entries=entries)


def forward_map(kd: KDDistribution, m: ErrorModel) -> dict[tuple[int, int], float]:
    """Outcome table produced by an error model acting on a quasi-probability.

    Exact inverse of `reconstruct_kd` at matching ``(vx, vy, c)``. The error
    weights couple to the quasi-probability through its four moments, with
    the correlation moment paired with ``-c`` (module docstring); for the
    physical model of a measurement with visibilities (vx, vy, vz), i.e.
    ``c = i*vz``, this reproduces the measurement's outcome probabilities.
    Materially complex outputs are rejected as an inconsistent pairing of
    quasi-probability and model.
    """
    vx, vy, c = visibilities_from_error_model(m)
    m0 = complex(sum(kd.entries[o] for o in OUTCOMES4))
    mx = complex(sum(x * kd.entries[(x, y)] for x, y in OUTCOMES4))
    my = complex(sum(y * kd.entries[(x, y)] for x, y in OUTCOMES4))
    mxy = complex(sum(x * y * kd.entries[(x, y)] for x, y in OUTCOMES4))
    table = {}
    for x, y in OUTCOMES4:
        value = (m0 + vx * x * mx + vy * y * my - c * x * y * mxy) / 4.0
        if abs(value.imag) > 1e-10:
            raise ValueError(
                f"forward map produced a complex probability at {(x, y)}: {value!r}; "
                "the quasi-probability and error model are inconsistent"
            )
        table[(x, y)] = value.real
    return table


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    passed: bool
    max_deviation: float


@dataclass(frozen=True)
class IdentityReport:
    checks: tuple[IdentityCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def summary(self) -> str:
        lines = [
            f"{'PASS' if c.passed else 'FAIL'} {c.name} (max deviation {c.max_deviation:.3e})"
            for c in self.checks
        ]
        return "\n".join(lines)


def random_qubit_density(rng: np.random.Generator) -> np.ndarray:
    """Density matrix with Bloch vector drawn uniformly from the unit ball."""
    direction = rng.normal(size=3)
    direction /= np.linalg.norm(direction)
    radius = rng.random() ** (1.0 / 3.0)
    r = radius * direction
    return (
        identity(2) + r[0] * pauli("X") + r[1] * pauli("Y") + r[2] * pauli("Z")
    ) / 2.0


def verify_operator_identities(samples: int = 1000, seed: int = 20240901) -> IdentityReport:
    """Check the operator identities behind the imaginary error correlation.

    Verified to ``ATOL_ALGEBRA`` and reported, never raised:

    * ``X @ Y = i*Z``;
    * ``ideal_operator(sx, sy)`` equals the measurement-family expression
      with ``vx = vy = 1`` and ``vz`` replaced by the imaginary unit;
    * the four ideal operators sum to the identity;
    * ``Tr(ideal_operator(x, y) @ rho)`` equals the quasi-probability entry
      ``kd_from_state(rho)[(x, y)]`` for ``samples`` random states.
    """
    checks = []

    dev = float(np.max(np.abs(pauli("X") @ pauli("Y") - 1j * pauli("Z"))))
    checks.append(IdentityCheck("x_times_y_equals_i_z", dev <= ATOL_ALGEBRA, dev))

    eye = identity(2)
    dev = 0.0
    for sx, sy in OUTCOMES4:
        family = (eye + sx * pauli("X") + sy * pauli("Y") + sx * sy * 1j * pauli("Z")) / 4.0
        dev = max(dev, float(np.max(np.abs(ideal_operator(sx, sy) - family))))
    checks.append(IdentityCheck("ideal_operator_is_family_at_vz_i", dev <= ATOL_ALGEBRA, dev))

    total = sum(ideal_operator(sx, sy) for sx, sy in OUTCOMES4)
    dev = float(np.max(np.abs(total - eye)))
    checks.append(IdentityCheck("ideal_operators_sum_to_identity", dev <= ATOL_ALGEBRA, dev))

    rng = np.random.Generator(np.random.Philox(key=seed))
    dev = 0.0
    for _ in range(samples):
        rho = random_qubit_density(rng)
        kd = kd_from_state(rho)
        for x, y in OUTCOMES4:
            diff = abs(trace_product(ideal_operator(x, y), rho) - kd.entries[(x, y)])
            dev = max(dev, float(diff))
    checks.append(IdentityCheck("ideal_traces_equal_kd_entries", dev <= ATOL_ALGEBRA, dev))

    return IdentityReport(checks=tuple(checks))
