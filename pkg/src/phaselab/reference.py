"""
Closed-form results for the three-qubit LMG rotating models.

Pure formula evaluations: spectra, printed matrices and eigenvectors (in the
printed basis ordering, see :func:`phaselab.spin.paper_basis_permutation`),
Aharonov-Anandan phases, degenerate holonomy angles and Berry phases. These
are the fixtures the numerical engine and the propagation oracle are checked
against.

Normalizations are always the exact squared norms of the unnormalized
vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFormulaError, ValidationError
from .phases import principal_angle

# relative floor below which a closed-form eigenvector is treated as collapsed
NORM_FLOOR = 1e-12


def _nonneg_root(value: float, scale: float, name: str) -> float:
    if value < -1e-12 * scale:
        raise ValidationError(f"discriminant {name} = {value:.3e} is negative")
    return math.sqrt(max(value, 0.0))


def discriminant(gamma: float, s: float) -> float:
    """9s^2 + gamma^2 - 3 s gamma - 3 s - gamma + 1; non-negative for real input."""
    return 9 * s * s + gamma * gamma - 3 * s * gamma - 3 * s - gamma + 1


@dataclass(frozen=True)
class ZModelSpectrum:
    r: float
    p1: float
    p2: float
    p34: float

    def values(self) -> np.ndarray:
        return np.array([self.p1, self.p2, self.p34, self.p34])


def z_spectrum_closed(gamma: float, h: float, omega: float) -> ZModelSpectrum:
    """Eigenvalues of the 4x4 block P(gamma, h, omega) of the z-drive frame generator."""
    s = h + omega
    r = 9 * h * h + 9 * omega * omega + gamma * gamma + 18 * h * omega - 3 * h * gamma \
        - 3 * gamma * omega - 3 * omega - 3 * h - gamma + 1
    root = _nonneg_root(r, 1.0 + 9 * s * s + gamma * gamma, "r")
    base = -0.5 * s - (1 + gamma) / 6.0
    return ZModelSpectrum(r, base - root / 3.0, base + root / 3.0, 0.5 * s + (1 + gamma) / 6.0)


def printed_p_matrix(gamma: float, h: float, omega: float) -> np.ndarray:
    """P(gamma, h, omega) entry by entry as printed."""
    s = h + omega
    a = -(1 - gamma) / 6.0
    b = -(1 + gamma) / 6.0
    return np.array([
        [-1.5 * s, a, a, a],
        [a, 0.5 * s, b, b],
        [a, b, 0.5 * s, b],
        [a, b, b, 0.5 * s],
    ], dtype=complex)


def printed_z_drive_block(omega: float) -> np.ndarray:
    return 0.5 * omega * np.diag([3.0, -1.0, -1.0, -1.0]).astype(complex)


def printed_h_tilde_block(gamma: float, h: float) -> np.ndarray:
    """The 4x4 block of H~ on |000>, |011>, |101>, |110> as printed."""
    return printed_p_matrix(gamma, h, 0.0)


def printed_x_frame_generator(gamma: float, h: float, omega: float) -> np.ndarray:
    """The printed 8x8 frame generator H~ - omega S_x in the printed ordering."""
    out = np.zeros((8, 8), dtype=complex)
    out[:4, :4] = printed_p_matrix(gamma, h, 0.0)
    out[4:, 4:] = printed_p_matrix(gamma, -h, 0.0)
    out[:4, 4:] = -np.asarray(printed_x_drive(omega))[:4, 4:]
    out[4:, :4] = out[:4, 4:].T
    return out


def printed_x_drive(omega: float) -> np.ndarray:
    """omega * S_x in the printed ordering."""
    out = np.zeros((8, 8), dtype=complex)
    # each even-parity state couples to the three single flips, never to its complement
    block = np.ones((4, 4)) - np.eye(4)
    out[:4, 4:] = block
    out[4:, :4] = block.T
    return 0.5 * omega * out


def z_cyclic_vector_closed(gamma: float, h: float, omega: float, index: int) -> np.ndarray:
    """Unnormalized printed eigenvector of P for p1 (index 1) or p2 (index 2)."""
    if index not in (1, 2):
        raise ValidationError("index must be 1 or 2")
    spectrum = z_spectrum_closed(gamma, h, omega)
    sign = -1.0 if index == 1 else 1.0
    head = gamma + 1 - 6 * (omega + h) + sign * 2 * math.sqrt(max(spectrum.r, 0.0))
    return np.array([head, gamma - 1, gamma - 1, gamma - 1], dtype=complex)


def _checked_norm(vec: np.ndarray, scale: float) -> float:
    n = float(np.vdot(vec, vec).real)
    if n <= NORM_FLOOR * scale * scale:
        raise DegenerateFormulaError("closed-form eigenvector degenerates; use numeric path")
    return n


def aa_normalization(gamma: float, h: float, omega: float, index: int) -> float:
    """Squared norm n_index of the printed cyclic vector."""
    vec = z_cyclic_vector_closed(gamma, h, omega, index)
    spectrum = z_spectrum_closed(gamma, h, omega)
    scale = 1 + abs(gamma) + 6 * abs(h + omega) + 2 * math.sqrt(max(spectrum.r, 0.0))
    return _checked_norm(vec, scale)


def aa_phase_closed(gamma: float, h: float, omega: float, index: int, block: int = 1) -> float:
    """Closed-form A-A phase of the z-drive cyclic state ``index`` in ``block``.

    Block 1 is P(gamma, h, omega) on |000>,|011>,|101>,|110>. Block 2 is
    P(gamma, -h, -omega) on |111>,|100>,|010>,|001>, where the drive block
    carries the opposite sign; there the phase is -(3 pi / n)[...] - pi with
    the block-2 vector.
    """
    if block not in (1, 2):
        raise ValidationError("block must be 1 or 2")
    sgn = 1.0 if block == 1 else -1.0
    g_h, g_w = sgn * h, sgn * omega
    n = aa_normalization(gamma, g_h, g_w, index)
    head = z_cyclic_vector_closed(gamma, g_h, g_w, index)[0].real
    eta = sgn * (3 * math.pi / n) * (head * head - (1 - gamma) ** 2) - math.pi
    return principal_angle(eta)


def x_spectrum_closed(gamma: float, h: float, omega: float) -> tuple[float, float]:
    """Doubly degenerate eigenvalues (B1, B2) of the x-drive frame generator."""
    rho = math.hypot(h, omega)
    return (1 + gamma - 3 * rho) / 6.0, (1 + gamma + 3 * rho) / 6.0


def x_cyclic_vectors_closed(h: float, omega: float, group: int) -> np.ndarray:
    """Printed unnormalized eigenvectors spanning group 1 or 2, as columns (printed order)."""
    if not omega > 0:
        raise ValidationError("the printed vectors need omega > 0")
    rho = math.hypot(h, omega)
    if group == 1:
        c = (rho - h) / omega
        v1 = [0, c, 0, -c, 0, -1, 0, 1]
        v2 = [0, c / 2, -c, c / 2, 0, -0.5, 1, -0.5]
    elif group == 2:
        c = (h + rho) / omega
        v1 = [0, -c, 0, c, 0, -1, 0, 1]
        v2 = [0, -c / 2, c, -c / 2, 0, -0.5, 1, -0.5]
    else:
        raise ValidationError("group must be 1 or 2")
    return np.array([v1, v2], dtype=complex).T


def _direction_cosine(h: float, omega: float) -> float:
    rho = math.hypot(h, omega)
    if rho == 0:
        raise ValidationError("holonomy direction undefined at h = omega = 0")
    return omega / rho


def x_connection_closed(h: float, omega: float, group: int) -> float:
    """Scalar value of the constant 2x2 connection on group 1 or 2.

    Group 1 is the printed (omega/2)(omega/rho - 1); group 2,
    -(omega/2)(omega/rho + 1), follows from the second printed factor.
    """
    c = _direction_cosine(h, omega)
    if group == 1:
        return 0.5 * omega * (c - 1)
    if group == 2:
        return -0.5 * omega * (c + 1)
    raise ValidationError("group must be 1 or 2")


def x_holonomy_closed(h: float, omega: float, group: int) -> float:
    """Angle phi of the scalar holonomy exp(i phi) * I_2, principal value."""
    c = _direction_cosine(h, omega)
    if group == 1:
        return principal_angle(math.pi * (c - 1))
    if group == 2:
        return principal_angle(-math.pi * (c + 1))
    raise ValidationError("group must be 1 or 2")


@dataclass(frozen=True)
class BerrySpectrum:
    q: float
    lambda1: float
    lambda2: float


def berry_spectrum_closed(gamma: float, h: float) -> BerrySpectrum:
    """Non-degenerate eigenvalues of the printed 4x4 block of H~."""
    q = 9 * h * h + gamma * gamma - 3 * h * gamma - 3 * h - gamma + 1
    root = _nonneg_root(q, 1.0 + 9 * h * h + gamma * gamma, "q")
    return BerrySpectrum(q, -(1 + gamma + 3 * h + 2 * root) / 6.0, -(1 + gamma + 3 * h - 2 * root) / 6.0)


def berry_degenerate_value(gamma: float, h: float) -> float:
    """Doubly degenerate eigenvalue of the same block (the z-drive p34 at omega = 0)."""
    return 0.5 * h + (1 + gamma) / 6.0


def berry_vector_closed(gamma: float, h: float, index: int) -> np.ndarray:
    """Unnormalized printed eigenvector |1> or |2> of the 4x4 H~ block."""
    if index not in (1, 2):
        raise ValidationError("index must be 1 or 2")
    q = berry_spectrum_closed(gamma, h).q
    sign = -1.0 if index == 1 else 1.0
    head = 1 + gamma - 6 * h + sign * 2 * math.sqrt(max(q, 0.0))
    return np.array([head, gamma - 1, gamma - 1, gamma - 1], dtype=complex)


def berry_normalization(gamma: float, h: float, index: int) -> float:
    """Squared norm N_index of the printed vector (the squared reading of the printed N)."""
    q = berry_spectrum_closed(gamma, h).q
    scale = 1 + abs(gamma) + 6 * abs(h) + 2 * math.sqrt(max(q, 0.0))
    return _checked_norm(berry_vector_closed(gamma, h, index), scale)


def berry_phase_closed(gamma: float, h: float, index: int) -> float:
    """Berry phase (3 pi / N)[(head)^2 - (gamma - 1)^2] - pi, principal value."""
    n = berry_normalization(gamma, h, index)
    head = berry_vector_closed(gamma, h, index)[0].real
    return principal_angle((3 * math.pi / n) * (head * head - (gamma - 1) ** 2) - math.pi)
