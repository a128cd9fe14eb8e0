"""
Cyclic states, Aharonov-Anandan phases and holonomies of rotating-frame models.

For H(t) = exp(-iAt) H~ exp(iAt) the propagator factorizes as
U(t) = exp(-iAt) exp(-iBt) with B = H~ - A. Joint eigenvectors of B and the
monodromy exp(-iAT) are the cyclic initial states; everything else here is
built on top of that decomposition.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import CyclicityError, PhaseLabError, ValidationError
from .linalg import (
    as_hermitian,
    as_unitary,
    commutator,
    fix_gauge,
    hermitian_eig,
    max_norm,
    ordered_exp,
    spectral_exp,
)
from .phases import angle_distance, principal_angle
from .spin import RotatingModel

COMMUTATION_TOL = 1e-9
SCALAR_ACTION_TOL = 1e-9


@dataclass(frozen=True)
class CyclicGroup:
    """Orthonormal cyclic states (columns of ``states``) sharing one eigenvalue of B.

    ``theta`` is the monodromy angle: exp(-iAT) acts on the group as exp(-i theta).
    """

    b_value: float
    states: np.ndarray
    theta: float

    @property
    def dimension(self) -> int:
        return self.states.shape[1]

    def projector(self) -> np.ndarray:
        return self.states @ self.states.conj().T


@dataclass(frozen=True)
class PhaseBreakdown:
    """Total, dynamical and geometric phase of one cyclic state, principal values."""

    total: float
    dynamical: float
    geometric: float


@dataclass(frozen=True)
class Holonomy:
    geometric_factor: np.ndarray
    dynamical_factor: np.ndarray

    @property
    def group_dimension(self) -> int:
        return self.geometric_factor.shape[0]


def frame_generator(model: RotatingModel) -> np.ndarray:
    """B = H~ - A."""
    return as_hermitian(np.asarray(model.tilde_h) - np.asarray(model.drive))


def monodromy(model: RotatingModel) -> np.ndarray:
    """exp(-i A T), the drive rotation over one period."""
    return spectral_exp(model.drive, model.period)


def refine_by_symmetries(vectors: np.ndarray, symmetries: Sequence[np.ndarray]) -> list[np.ndarray]:
    """Split a degenerate block by the eigenvalues of commuting symmetry operators."""
    blocks = [vectors]
    for sym in symmetries:
        sym = np.asarray(sym)
        split = []
        for v in blocks:
            if v.shape[1] == 1:
                split.append(v)
                continue
            es = hermitian_eig(v.conj().T @ sym @ v)
            if len(es.groups) == 1:
                split.append(v)
                continue
            rotated = v @ np.asarray(es.vectors)
            split.extend(rotated[:, list(g)] for g in es.groups)
        blocks = split
    return blocks


def _scalar_action(u: np.ndarray, states: np.ndarray) -> tuple[complex, float]:
    block = states.conj().T @ u @ states
    c = np.trace(block) / block.shape[0]
    return c, max_norm(block - c * np.eye(block.shape[0]))


def cyclic_states(
    model: RotatingModel,
    group_tol: float | None = None,
    symmetries: Sequence[np.ndarray] | None = None,
) -> list[CyclicGroup]:
    """Group the eigenvectors of B into cyclic groups, ordered by eigenvalue.

    Eigenvalue clusters are split further along the eigenspaces of
    ``symmetries`` (default: the model's conserved operators), which removes
    accidental degeneracies between symmetry sectors. Raises CyclicityError
    if the monodromy does not commute with B or is not scalar on a group.
    """
    b = np.asarray(frame_generator(model))
    u_period = np.asarray(monodromy(model))
    comm = max_norm(commutator(u_period, b))
    if comm > COMMUTATION_TOL * (1.0 + max_norm(b)):
        raise CyclicityError(f"drive not compatible with period (commutator {comm:.3e})")
    if symmetries is None:
        symmetries = model.symmetries

    es = hermitian_eig(b, group_tol)
    groups = []
    for k, idx in enumerate(es.groups):
        for block in refine_by_symmetries(np.asarray(es.vectors)[:, list(idx)], symmetries):
            block = fix_gauge(block)
            c, residual = _scalar_action(u_period, block)
            if residual > SCALAR_ACTION_TOL:
                raise CyclicityError(
                    f"monodromy is not scalar on group at b = {es.group_values()[k]:.6g} "
                    f"(residual {residual:.3e}); check group_tol"
                )
            b_value = float(np.real(np.trace(block.conj().T @ b @ block))) / block.shape[1]
            block.setflags(write=False)
            groups.append(CyclicGroup(b_value, block, principal_angle(-np.angle(c))))
    groups.sort(key=lambda g: g.b_value)
    return groups


def degenerate_groups(groups: Sequence[CyclicGroup]) -> list[CyclicGroup]:
    return [g for g in groups if g.dimension > 1]


def nondegenerate_groups(groups: Sequence[CyclicGroup]) -> list[CyclicGroup]:
    return [g for g in groups if g.dimension == 1]


def best_overlap(groups: Sequence[CyclicGroup], vector) -> tuple[int, float]:
    """Index of the group capturing most of ``vector`` and the captured weight."""
    v = np.asarray(vector, dtype=complex)
    v = v / np.linalg.norm(v)
    weights = [float(np.linalg.norm(g.states.conj().T @ v) ** 2) for g in groups]
    k = int(np.argmax(weights))
    return k, weights[k]


def aa_phase(model: RotatingModel, group: CyclicGroup) -> PhaseBreakdown:
    """Non-degenerate A-A phase: geometric <phi|A|phi> T - theta, dynamical -<phi|H~|phi> T."""
    if group.dimension != 1:
        raise ValidationError("aa_phase needs a one-dimensional group; use aa_holonomy instead")
    phi = group.states[:, 0]
    period = model.period
    mean_drive = float(np.vdot(phi, np.asarray(model.drive) @ phi).real)
    mean_h = float(np.vdot(phi, np.asarray(model.tilde_h) @ phi).real)
    geometric = principal_angle(mean_drive * period - group.theta)
    dynamical = principal_angle(-mean_h * period)
    total = principal_angle(geometric + dynamical)
    direct = principal_angle(-group.theta - group.b_value * period)
    if angle_distance(total, direct) > 1e-8 * (1.0 + abs(group.b_value) * period):
        raise PhaseLabError(f"phase bookkeeping mismatch: {total} vs {direct}")
    return PhaseBreakdown(total, dynamical, geometric)


def degenerate_connection(model: RotatingModel, group: CyclicGroup) -> np.ndarray:
    """Constant connection <phi_a|A|phi_b> - (theta/T) delta_ab on the group."""
    v = group.states
    conn = v.conj().T @ np.asarray(model.drive) @ v - (group.theta / model.period) * np.eye(group.dimension)
    return as_hermitian(0.5 * (conn + conn.conj().T))


def degenerate_dynamical(model: RotatingModel, group: CyclicGroup) -> np.ndarray:
    """Dynamical one-form <phi_a|H~|phi_b> on the group."""
    v = group.states
    e = v.conj().T @ np.asarray(model.tilde_h) @ v
    return as_hermitian(0.5 * (e + e.conj().T))


def aa_holonomy(
    model: RotatingModel,
    group: CyclicGroup,
    method: str = "ordered",
    tol: float = 1e-12,
) -> Holonomy:
    """Geometric factor T exp(i int A dt) and dynamical factor exp(-i E T) of a group.

    ``method="ordered"`` integrates the time-ordered exponential numerically;
    ``"spectral"`` uses that the connection is constant and exponentiates once.
    """
    conn = np.asarray(degenerate_connection(model, group))
    if method == "ordered":
        generator = 1j * conn
        geometric = ordered_exp(lambda t: generator, 0.0, model.period, tol)
    elif method == "spectral":
        geometric = spectral_exp(-conn, model.period)
    else:
        raise ValidationError(f"unknown holonomy method {method!r}")
    dynamical = spectral_exp(degenerate_dynamical(model, group), model.period)
    return Holonomy(as_unitary(geometric), as_unitary(dynamical))


def connection_commutator_norm(model: RotatingModel, group: CyclicGroup) -> float:
    """Max-norm of [connection, dynamical one-form] on the group."""
    return max_norm(commutator(degenerate_connection(model, group), degenerate_dynamical(model, group)))


def cycle_unitary_from_factors(model: RotatingModel, group: CyclicGroup, tol: float = 1e-12) -> np.ndarray:
    """U(T) on the group as dynamical x geometric factor.

    Only valid when the two one-forms commute; otherwise this raises rather
    than returning a product that is not the evolution.
    """
    norm = connection_commutator_norm(model, group)
    if norm > tol:
        raise PhaseLabError(f"connection and dynamical one-form do not commute ({norm:.3e})")
    hol = aa_holonomy(model, group, method="spectral")
    return hol.dynamical_factor @ hol.geometric_factor


def scalar_angle(u, tol: float = 1e-6) -> float | None:
    """Angle phi with u = exp(i phi) I within ``tol``, or None if u is not scalar."""
    u = np.asarray(u)
    c = np.trace(u) / u.shape[0]
    if max_norm(u - c * np.eye(u.shape[0])) > tol:
        return None
    return principal_angle(np.angle(c))


def eigenphases(u) -> np.ndarray:
    """Sorted principal eigen-angles of a unitary matrix."""
    return np.sort(principal_angle(np.angle(np.linalg.eigvals(np.asarray(u)))))


def trace_identity_residual(model: RotatingModel, groups: Sequence[CyclicGroup]) -> float:
    """|sum_n f_n b_n - tr B|."""
    total = sum(g.dimension * g.b_value for g in groups)
    return abs(total - float(np.trace(np.asarray(frame_generator(model))).real))


@dataclass(frozen=True)
class FloquetSplit:
    """U(t) = Z(t) exp(iMt) with Z(t) = exp(-iAt) exp(i Omega t / T), M = -B - Omega/T."""

    model: RotatingModel
    omega_operator: np.ndarray
    m_operator: np.ndarray

    def z(self, t: float) -> np.ndarray:
        period = self.model.period
        return np.asarray(spectral_exp(self.model.drive, t)) @ np.asarray(
            spectral_exp(self.omega_operator, -t / period)
        )

    @property
    def z_of_t(self) -> Callable[[float], np.ndarray]:
        return self.z

    def reconstruct(self, t: float) -> np.ndarray:
        """Z(t) exp(iMt)."""
        return self.z(t) @ np.asarray(spectral_exp(self.m_operator, -t))


def floquet_split(model: RotatingModel, groups: Sequence[CyclicGroup] | None = None) -> FloquetSplit:
    """Assemble Omega = sum_n theta_n P_n from the cyclic groups and split U(t)."""
    if groups is None:
        groups = cyclic_states(model)
    omega_op = sum(g.theta * g.projector() for g in groups)
    omega_op = as_hermitian(0.5 * (omega_op + omega_op.conj().T))
    m = as_hermitian(-np.asarray(frame_generator(model)) - np.asarray(omega_op) / model.period)
    return FloquetSplit(model, omega_op, m)


def finite_difference_connection(
    split: FloquetSplit, group: CyclicGroup, t: float, step: float | None = None
) -> np.ndarray:
    """i <m_a| Z^dagger dZ/dt |m_b> by central differences (default step 1e-6 T)."""
    if step is None:
        step = 1e-6 * split.model.period
    dz = (split.z(t + step) - split.z(t - step)) / (2.0 * step)
    v = group.states
    return 1j * v.conj().T @ split.z(t).conj().T @ dz @ v

