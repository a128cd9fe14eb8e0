"""
Multi-qubit spin operators and the three-qubit LMG rotating-frame models.

Basis convention: |0> is spin up (sigma_z |0> = +|0>) and in tensor products
site 1 is the slowest index, so ``|b1 b2 b3>`` sits at position
``4*b1 + 2*b2 + b3``. Matrices are stored in this lexicographic order; the
ordering used for the printed block forms is available through
:func:`paper_basis_permutation`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .errors import ValidationError
from .linalg import as_hermitian, spectral_exp

PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# printed ordering |000>,|011>,|101>,|110>,|111>,|100>,|010>,|001>
_PRINTED_ORDER = ("000", "011", "101", "110", "111", "100", "010", "001")


def _check_axis(axis: str, allowed: str = "xyz") -> str:
    if axis not in allowed or len(axis) != 1:
        raise ValidationError(f"axis must be one of {tuple(allowed)}, got {axis!r}")
    return axis


def basis_index(bits: str) -> int:
    """Lexicographic index of a computational basis label such as ``'011'``."""
    if not bits or set(bits) - {"0", "1"}:
        raise ValidationError(f"bad basis label {bits!r}")
    return int(bits, 2)


def basis_state(bits: str) -> np.ndarray:
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[basis_index(bits)] = 1.0
    return v


def pauli_string(n_qubits: int, axis: str, site: int) -> np.ndarray:
    """Pauli matrix ``axis`` on ``site`` (1-based), identity on the other qubits."""
    _check_axis(axis)
    if n_qubits < 1:
        raise ValidationError("n_qubits must be >= 1")
    if not 1 <= site <= n_qubits:
        raise ValidationError(f"site {site} outside 1..{n_qubits}")
    factors = [PAULI[axis] if k == site else np.eye(2) for k in range(1, n_qubits + 1)]
    return as_hermitian(reduce(np.kron, factors))


def collective_spin(n_qubits: int, axis: str) -> np.ndarray:
    """S_axis = (1/2) sum_k sigma_axis^k."""
    _check_axis(axis)
    if n_qubits < 1:
        raise ValidationError("n_qubits must be >= 1")
    total = sum(np.asarray(pauli_string(n_qubits, axis, k)) for k in range(1, n_qubits + 1))
    return as_hermitian(0.5 * total)


def total_spin_squared(n_qubits: int) -> np.ndarray:
    """Casimir S_x^2 + S_y^2 + S_z^2 of the collective spin."""
    s = [np.asarray(collective_spin(n_qubits, a)) for a in "xyz"]
    return as_hermitian(sum(m @ m for m in s))


def spin_flip_parity(n_qubits: int) -> np.ndarray:
    """Product of sigma_z over all sites: +1 on an even number of down spins."""
    return as_hermitian(reduce(np.kron, [PAULI["z"]] * n_qubits))


def lmg_hamiltonian(gamma: float, h: float) -> np.ndarray:
    """Three-qubit LMG Hamiltonian -(S_x^2 + gamma S_y^2)/3 - h S_z.

    The constant -(1 + gamma)/4 is removed, so this equals the pairwise form
    -(1/6) sum_{j<k}(sx sx + gamma sy sy) - (h/2) sum_k sz.
    """
    sx, sy, sz = (np.asarray(collective_spin(3, a)) for a in "xyz")
    h_tilde = -(sx @ sx + gamma * sy @ sy) / 3.0 - h * sz + 0.25 * (1.0 + gamma) * np.eye(8)
    return as_hermitian(h_tilde)


def lmg_hamiltonian_pairwise(gamma: float, h: float) -> np.ndarray:
    """Same operator as :func:`lmg_hamiltonian`, assembled from two-site Pauli products."""
    xx = np.zeros((8, 8), dtype=complex)
    yy = np.zeros((8, 8), dtype=complex)
    for j, k in ((1, 2), (2, 3), (1, 3)):
        xx += np.asarray(pauli_string(3, "x", j)) @ np.asarray(pauli_string(3, "x", k))
        yy += np.asarray(pauli_string(3, "y", j)) @ np.asarray(pauli_string(3, "y", k))
    zz = sum(np.asarray(pauli_string(3, "z", k)) for k in (1, 2, 3))
    return as_hermitian(-(xx + gamma * yy) / 6.0 - 0.5 * h * zz)


def paper_basis_permutation(n_qubits: int = 3) -> np.ndarray:
    """Lexicographic index for each position of the printed basis ordering.

    ``m[np.ix_(perm, perm)]`` re-expresses a lexicographic matrix in the
    printed ordering; ``v[perm]`` does the same for a vector.
    """
    if n_qubits != 3:
        raise ValidationError("the printed ordering is defined for three qubits only")
    perm = np.array([basis_index(b) for b in _PRINTED_ORDER])
    perm.setflags(write=False)
    return perm


def to_printed_basis(m: np.ndarray) -> np.ndarray:
    perm = paper_basis_permutation(3)
    m = np.asarray(m)
    if m.ndim == 1:
        return m[perm]
    return m[np.ix_(perm, perm)]


def from_printed_basis(m: np.ndarray) -> np.ndarray:
    """Inverse of :func:`to_printed_basis`; also accepts (8, k) column stacks."""
    inv = np.argsort(paper_basis_permutation(3))
    m = np.asarray(m)
    if m.ndim == 1:
        return m[inv]
    if m.shape[0] == m.shape[1]:
        return m[np.ix_(inv, inv)]
    return m[inv]


@dataclass(frozen=True)
class ModelParams:
    gamma: float
    h: float
    omega: float
    axis: str = "z"
    n_qubits: int = 3

    def __post_init__(self):
        if not (np.isfinite(self.gamma) and np.isfinite(self.h) and np.isfinite(self.omega)):
            raise ValidationError("model parameters must be finite")
        if not self.omega > 0:
            raise ValidationError("omega must be positive")
        if self.n_qubits < 1:
            raise ValidationError("n_qubits must be >= 1")
        _check_axis(self.axis, "zx")


@dataclass(frozen=True)
class RotatingModel:
    """H(t) = exp(-i A t) H~ exp(i A t) with drive A = omega * S_axis.

    ``symmetries`` lists Hermitian operators commuting with H~ and A. They
    only serve to split accidental degeneracies between symmetry sectors.
    """

    tilde_h: np.ndarray
    drive: np.ndarray
    params: ModelParams
    period: float
    symmetries: tuple = field(default=(), repr=False)

    @property
    def omega(self) -> float:
        return self.params.omega

    @property
    def dim(self) -> int:
        return self.tilde_h.shape[0]


def rotating_model(params: ModelParams) -> RotatingModel:
    """Build the LMG model driven about ``params.axis``."""
    if params.n_qubits != 3:
        raise ValidationError("the LMG model is implemented for three qubits")
    axis = _check_axis(params.axis, "zx")
    tilde_h = lmg_hamiltonian(params.gamma, params.h)
    drive = as_hermitian(params.omega * np.asarray(collective_spin(3, axis)))
    symmetries = (total_spin_squared(3),)
    if axis == "z":
        symmetries += (spin_flip_parity(3),)
    return RotatingModel(tilde_h, drive, params, 2.0 * math.pi / params.omega, symmetries)


def make_model(gamma: float, h: float, omega: float, axis: str = "z") -> RotatingModel:
    return rotating_model(ModelParams(gamma, h, omega, axis))


def hamiltonian_at(model: RotatingModel, t: float) -> np.ndarray:
    """H(t) = exp(-i A t) H~ exp(i A t)."""
    if t == 0:
        return model.tilde_h
    u = np.asarray(spectral_exp(model.drive, t))
    return as_hermitian(u @ model.tilde_h @ u.conj().T)
