"""Dense complex linear algebra for one- and two-qubit operators.

Everything downstream works with plain ``numpy`` arrays of ``complex128``:
state vectors of length 2 or 4 and square operator matrices of the same
dimensions. Conventions are fixed once here:

* Pauli matrices in the Z-diagonal basis, ``X = [[0,1],[1,0]]``,
  ``Y = [[0,-i],[i,0]]``, ``Z = diag(1,-1)``.
* Eigenstates and the singlet carry a global phase such that the first
  nonzero amplitude is real and positive.
* ``ATOL_ALGEBRA`` (1e-12) for exact algebraic identities,
  ``ATOL_EIG`` (1e-10) for eigensolves and positivity slack.
"""

from __future__ import annotations

import numpy as np

ATOL_ALGEBRA = 1e-12
ATOL_EIG = 1e-10

AXES = ("X", "Y", "Z")

_SQRT2 = np.sqrt(2.0)

_PAULI = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

_EIGENSTATE = {
    ("Z", +1): np.array([1, 0], dtype=complex),
    ("Z", -1): np.array([0, 1], dtype=complex),
    ("X", +1): np.array([1, 1], dtype=complex) / _SQRT2,
    ("X", -1): np.array([1, -1], dtype=complex) / _SQRT2,
    ("Y", +1): np.array([1, 1j], dtype=complex) / _SQRT2,
    ("Y", -1): np.array([1, -1j], dtype=complex) / _SQRT2,
}


def ensure_axis(axis: str) -> str:
    """Normalize an axis label to one of 'X', 'Y', 'Z'."""
    label = str(axis).upper()
    if label not in AXES:
        raise ValueError(f"unknown axis {axis!r}, expected one of {AXES}")
    return label


def ensure_sign(value: int, what: str = "value") -> int:
    if value not in (+1, -1):
        raise ValueError(f"{what} must be +1 or -1, got {value!r}")
    return int(value)


def _as_complex_array(a, what: str) -> np.ndarray:
    arr = np.asarray(a, dtype=complex)
    if not np.all(np.isfinite(arr.view(float))):
        raise ValueError(f"{what} contains non-finite entries")
    return arr


def _ensure_operator(m, what: str = "operator") -> np.ndarray:
    arr = _as_complex_array(m, what)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] not in (2, 4):
        raise ValueError(f"{what} must be a 2x2 or 4x4 matrix, got shape {arr.shape}")
    return arr


def is_hermitian(m, atol: float = ATOL_ALGEBRA) -> bool:
    arr = _ensure_operator(m)
    return bool(np.max(np.abs(arr - arr.conj().T)) <= atol)


def identity(dim: int = 2) -> np.ndarray:
    if dim not in (2, 4):
        raise ValueError(f"dimension must be 2 or 4, got {dim}")
    return np.eye(dim, dtype=complex)


def pauli(axis: str) -> np.ndarray:
    """Pauli matrix for the given axis (Hermitian, traceless, squares to I)."""
    return _PAULI[ensure_axis(axis)].copy()


def eigenstate(axis: str, value: int) -> np.ndarray:
    """Normalized eigenvector of ``pauli(axis)`` with eigenvalue ``value``."""
    return _EIGENSTATE[(ensure_axis(axis), ensure_sign(value))].copy()


def singlet() -> np.ndarray:
    """Two-qubit state with all three pair correlations equal to -1."""
    return np.array([0, 1, -1, 0], dtype=complex) / _SQRT2


def ensure_state_vector(psi, what: str = "state") -> np.ndarray:
    arr = _as_complex_array(psi, what)
    if arr.ndim != 1 or arr.shape[0] not in (2, 4):
        raise ValueError(f"{what} must be a length-2 or length-4 vector, got shape {arr.shape}")
    norm_sq = float(np.vdot(arr, arr).real)
    if abs(norm_sq - 1.0) > ATOL_ALGEBRA:
        raise ValueError(f"{what} is not normalized: |psi|^2 = {norm_sq!r}")
    return arr


def density(psi) -> np.ndarray:
    """Rank-1 density matrix ``|psi><psi|`` of a normalized state vector."""
    arr = ensure_state_vector(psi)
    return np.outer(arr, arr.conj())


def ensure_density_matrix(rho, dim: int | None = None, what: str = "density matrix") -> np.ndarray:
    """Validate a density matrix: Hermitian, unit trace, positive within slack."""
    arr = _ensure_operator(rho, what)
    if dim is not None and arr.shape[0] != dim:
        raise ValueError(f"{what} must be {dim}x{dim}, got shape {arr.shape}")
    if not is_hermitian(arr, atol=ATOL_EIG):
        raise ValueError(f"{what} is not Hermitian")
    tr = complex(np.trace(arr))
    if abs(tr - 1.0) > ATOL_EIG:
        raise ValueError(f"{what} does not have unit trace: trace = {tr!r}")
    if min_eigenvalue_hermitian(arr) < -ATOL_EIG:
        raise ValueError(f"{what} is not positive semidefinite")
    return arr


def tensor(a, b) -> np.ndarray:
    """Kronecker product of two single-qubit operators (2x2 inputs only)."""
    ma = _as_complex_array(a, "left factor")
    mb = _as_complex_array(b, "right factor")
    if ma.shape != (2, 2) or mb.shape != (2, 2):
        raise ValueError(f"tensor expects 2x2 factors, got shapes {ma.shape} and {mb.shape}")
    return np.kron(ma, mb)


def tensor_state(psi_a, psi_b) -> np.ndarray:
    """Kronecker product of two single-qubit state vectors."""
    va = _as_complex_array(psi_a, "left state")
    vb = _as_complex_array(psi_b, "right state")
    if va.shape != (2,) or vb.shape != (2,):
        raise ValueError("tensor_state expects length-2 vectors")
    return np.kron(va, vb)


def trace_product(m, rho) -> complex:
    """``Tr(m @ rho)`` for equally sized operators."""
    ma = _ensure_operator(m, "first operator")
    mb = _ensure_operator(rho, "second operator")
    if ma.shape != mb.shape:
        raise ValueError(f"dimension mismatch: {ma.shape} vs {mb.shape}")
    return complex(np.trace(ma @ mb))


def min_eigenvalue_hermitian(m) -> float:
    """Smallest eigenvalue of a Hermitian operator.

    The 2x2 case uses the closed form ``(a+d)/2 - sqrt(((a-d)/2)^2 + |b|^2)``;
    the 4x4 case falls back to a dense Hermitian eigensolve.
    """
    arr = _ensure_operator(m)
    if not is_hermitian(arr, atol=ATOL_EIG):
        raise ValueError("min_eigenvalue_hermitian requires a Hermitian input")
    if arr.shape[0] == 2:
        a = arr[0, 0].real
        d = arr[1, 1].real
        b = arr[0, 1]
        half_diff = 0.5 * (a - d)
        radius = np.hypot(half_diff, abs(b))
        return float(0.5 * (a + d) - radius)
    return float(np.linalg.eigvalsh(arr)[0])
