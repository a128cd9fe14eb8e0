"""
Brute-force Schrodinger propagation, independent of the B-decomposition.

The equation i dU/dt = H(t) U with H(t) = exp(-iAt) H~ exp(iAt) is integrated
directly by fixed-step RK4 with global step halving, in the eigenbasis of
the drive (a constant change of basis). Phases are then read off from first
principles: the total phase from <psi0|U(T)|psi0>, the dynamical phase as a
composite Simpson quadrature of -<psi(t)|H(t)|psi(t)> on the accepted grid.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.integrate import simpson

from .errors import ConvergenceError, CyclicityError, ValidationError
from .holonomy import PhaseBreakdown
from .linalg import RK4Grid, accumulate, hermitian_eig, max_norm, rk4_refinements, unitarity_defect
from .phases import principal_angle
from .spin import RotatingModel

DEFAULT_TOL = 1e-10
MAX_DEPTH = 20
CYCLIC_TOL = 1e-6


@dataclass(frozen=True)
class PropagationResult:
    final_state: np.ndarray
    trajectory_samples: tuple | None
    achieved_tol: float


class _RotatedHamiltonian:
    """H(t) expressed in the drive eigenbasis: entries H'_jk exp(-i (a_j - a_k) t)."""

    def __init__(self, model: RotatingModel):
        es = hermitian_eig(model.drive)
        self.basis = np.asarray(es.vectors)
        self.freqs = np.asarray(es.values)
        self.static = self.basis.conj().T @ np.asarray(model.tilde_h) @ self.basis

    def at(self, times: np.ndarray) -> np.ndarray:
        ph = np.exp(-1j * np.outer(times, self.freqs))
        return ph[:, :, None] * self.static[None] * ph.conj()[:, None, :]

    def generator(self, times: np.ndarray) -> np.ndarray:
        return -1j * self.at(times)

    def to_lab(self, u: np.ndarray) -> np.ndarray:
        return self.basis @ u @ self.basis.conj().T

    def vec_to_frame(self, psi: np.ndarray) -> np.ndarray:
        return self.basis.conj().T @ psi


def _check_tol(tol: float, t: float):
    if not tol > 0:
        raise ValidationError("tol must be positive")
    if not t >= 0:
        raise ValidationError("propagation time must be non-negative")


def evolution_operator(
    model: RotatingModel, t: float, tol: float = DEFAULT_TOL, max_depth: int = MAX_DEPTH
) -> np.ndarray:
    """U(t) by direct integration, converged until successive halvings differ by < tol."""
    _check_tol(tol, t)
    rot = _RotatedHamiltonian(model)
    if t == 0:
        return np.eye(model.dim, dtype=complex)
    current = _segment(rot, 0.0, t, tol, max_depth)
    u = rot.to_lab(current)
    defect = unitarity_defect(u)
    if defect > 10 * tol:
        raise ConvergenceError(f"unitarity defect {defect:.3e} exceeds 10*tol", (defect,))
    return u


def _segment(rot: _RotatedHamiltonian, t0: float, t1: float, tol: float, max_depth: int) -> np.ndarray:
    previous, history = None, []
    try:
        for grid in rk4_refinements(rot.generator, t0, t1, max_depth=max_depth):
            current = grid.product()
            if previous is not None:
                history.append(max_norm(current - previous))
                if history[-1] < tol:
                    return current
            previous = current
    except ConvergenceError:
        raise ConvergenceError("propagation did not converge", history[-2:]) from None
    raise AssertionError("unreachable")


def evolution_operators(
    model: RotatingModel, times: Sequence[float], tol: float = DEFAULT_TOL, max_depth: int = MAX_DEPTH
) -> list[np.ndarray]:
    """U(t) at several times from one sweep, each segment converged to ``tol``."""
    times = [float(t) for t in times]
    for t in times:
        _check_tol(tol, t)
    rot = _RotatedHamiltonian(model)
    order = sorted(range(len(times)), key=lambda k: times[k])
    out: list[np.ndarray] = [None] * len(times)
    u = np.eye(model.dim, dtype=complex)
    last = 0.0
    for k in order:
        if times[k] > last:
            u = _segment(rot, last, times[k], tol, max_depth) @ u
            last = times[k]
        out[k] = rot.to_lab(u)
    return out


@dataclass(frozen=True)
class OraclePhases:
    """Per-state oracle output for states sharing one propagation."""

    total: np.ndarray
    dynamical: np.ndarray
    overlap: np.ndarray
    achieved_tol: float
    steps: int
    propagator: np.ndarray | None = None

    def breakdown(self, k: int) -> PhaseBreakdown:
        total = principal_angle(self.total[k])
        dyn = principal_angle(self.dynamical[k])
        return PhaseBreakdown(total, dyn, principal_angle(total - dyn))


def _path_phases(rot: _RotatedHamiltonian, grid: RK4Grid, states: np.ndarray):
    """Walk the grid carrying the states; return U(T), dynamical phases, overlaps, norm drift."""
    u = np.eye(states.shape[0], dtype=complex)
    psi = states
    energies = []
    drift = 0.0
    for g_left, steps in grid.step_chunks():
        path = accumulate(steps, psi)  # (m+1, d, k)
        h_left = 1j * g_left
        energies.append(np.einsum("tdk,tde,tek->tk", path[:-1].conj(), h_left, path[:-1]).real)
        drift = max(drift, float(np.max(np.abs(np.linalg.norm(path, axis=1) - 1))))
        psi = path[-1]
        u = _chain_into(steps, u)
    h_end = rot.at(np.array([grid.t1]))[0]
    energies.append(np.einsum("dk,de,ek->k", psi.conj(), h_end, psi).real[None])
    energy = np.concatenate(energies)
    dynamical = -simpson(energy, x=grid.times, axis=0)
    overlap = np.einsum("dk,dk->k", states.conj(), psi)
    return u, dynamical, overlap, drift


def _chain_into(steps, u):
    for r in steps:
        u = r @ u
    return u


def _converged_path(model: RotatingModel, states, tol: float, max_depth: int):
    """Refine until U(T) moves by < tol and every dynamical phase by < tol * max(1, |delta|)."""
    rot = _RotatedHamiltonian(model)
    frame_states = rot.vec_to_frame(states)
    previous, history = None, []
    try:
        for grid in rk4_refinements(rot.generator, 0.0, model.period, max_depth=max_depth):
            result = _path_phases(rot, grid, frame_states)
            u, dyn = result[0], result[1]
            if previous is not None:
                du = max_norm(u - previous[0])
                dd = float(np.max(np.abs(dyn - previous[1]) / np.maximum(1.0, np.abs(dyn))))
                history.append(max(du, dd))
                if du < tol and dd < tol:
                    return result, history[-1], grid.n
            previous = (u, dyn)
    except ConvergenceError:
        raise ConvergenceError("oracle propagation did not converge", history[-2:]) from None
    raise AssertionError("unreachable")


def oracle_phases(
    model: RotatingModel,
    states,
    tol: float = DEFAULT_TOL,
    max_depth: int = MAX_DEPTH,
    require_cyclic: bool = True,
) -> OraclePhases:
    """Total and dynamical phases of several initial states over one period.

    Refines until U(T) changes by less than ``tol`` (max-norm) and every
    dynamical phase by less than ``tol`` relative to max(1, |delta|) between
    halvings. Raises CyclicityError when a state's return overlap
    |<psi0|U(T)|psi0>| is below 1 - 1e-6 and ``require_cyclic``.
    """
    _check_tol(tol, model.period)
    states = np.asarray(states, dtype=complex)
    if states.ndim == 1:
        states = states[:, None]
    norms = np.linalg.norm(states, axis=0)
    if np.any(np.abs(norms - 1) > 1e-9):
        raise ValidationError("initial states must be normalized")
    (u, dyn, overlap, _), achieved, n = _converged_path(model, states, tol, max_depth)
    magnitude = np.abs(overlap)
    if require_cyclic and np.any(magnitude < 1 - CYCLIC_TOL):
        worst = float(magnitude.min())
        raise CyclicityError(f"initial state is not cyclic: |<psi0|U(T)|psi0>| = {worst:.9f}")
    propagator = _RotatedHamiltonian(model).to_lab(u)
    return OraclePhases(np.angle(overlap), dyn, magnitude, achieved, n, propagator)


def propagate_state(
    model: RotatingModel, psi0, t: float, tol: float = DEFAULT_TOL, n_samples: int = 0
) -> PropagationResult:
    """Propagate one state to time t; optionally keep ``n_samples`` evenly spaced snapshots."""
    _check_tol(tol, t)
    psi0 = np.asarray(psi0, dtype=complex)
    u = evolution_operator(model, t, tol)
    final = u @ psi0
    samples = None
    if n_samples:
        samples = tuple(
            (float(s), evolution_operator(model, float(s), tol) @ psi0)
            for s in np.linspace(0.0, t, n_samples)
        )
    return PropagationResult(final, samples, tol)


def total_phase(model: RotatingModel, psi0, tol: float = DEFAULT_TOL) -> float:
    """Principal argument of <psi0|U(T)|psi0>, for a cyclic psi0."""
    psi0 = np.asarray(psi0, dtype=complex)
    u = evolution_operator(model, model.period, tol)
    amp = np.vdot(psi0, u @ psi0)
    if abs(amp) < 1 - CYCLIC_TOL:
        raise CyclicityError(f"initial state is not cyclic: |<psi0|U(T)|psi0>| = {abs(amp):.9f}")
    return principal_angle(np.angle(amp))


def dynamical_phase_integral(model: RotatingModel, psi0, tol: float = DEFAULT_TOL) -> float:
    """-int_0^T <psi|H|psi> dt on the converged propagation grid (not reduced mod 2 pi)."""
    res = oracle_phases(model, np.asarray(psi0, dtype=complex)[:, None], tol, require_cyclic=False)
    return float(res.dynamical[0])


def geometric_phase_oracle(model: RotatingModel, psi0, tol: float = DEFAULT_TOL) -> PhaseBreakdown:
    """Total minus dynamical phase for one cyclic state."""
    res = oracle_phases(model, np.asarray(psi0, dtype=complex)[:, None], tol)
    return res.breakdown(0)


def norm_drift(model: RotatingModel, psi0, tol: float = DEFAULT_TOL) -> float:
    """max_t | |psi(t)| - 1 | along the accepted propagation grid of one period."""
    state = np.asarray(psi0, dtype=complex)[:, None]
    (_, _, _, drift), _, _ = _converged_path(model, state, tol, MAX_DEPTH)
    return drift
