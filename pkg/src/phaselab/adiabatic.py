"""
Adiabatic limit: instantaneous eigenframes, Berry phases, Wilczek-Zee factors.

For H(t) = exp(-iAt) H~ exp(iAt) the instantaneous eigenvectors are rotated
eigenvectors of H~. Rotation alone does not close after one period when
exp(-iAT) = exp(-i theta) I with theta != 0, so the single-valued frame adds
the compensating phase exp(i theta t / T).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import CyclicityError, ValidationError
from .holonomy import Holonomy, monodromy, refine_by_symmetries
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
from .phases import principal_angle
from .spin import RotatingModel


@dataclass(frozen=True)
class EnergyGroup:
    """Orthonormal eigenvectors of H~ (columns of ``states``) sharing ``energy``."""

    energy: float
    states: np.ndarray

    @property
    def dimension(self) -> int:
        return self.states.shape[1]


@dataclass(frozen=True)
class InstantaneousFrame:
    time: float
    vectors: np.ndarray
    values: np.ndarray


def energy_groups(model: RotatingModel, group_tol: float | None = None) -> list[EnergyGroup]:
    """Eigen-clusters of H~, split along the model's symmetry sectors, ascending."""
    es = hermitian_eig(model.tilde_h, group_tol)
    out = []
    for idx in es.groups:
        for block in refine_by_symmetries(np.asarray(es.vectors)[:, list(idx)], model.symmetries):
            block = fix_gauge(block)
            block.setflags(write=False)
            energy = float(np.real(np.trace(block.conj().T @ np.asarray(model.tilde_h) @ block))) / block.shape[1]
            out.append(EnergyGroup(energy, block))
    out.sort(key=lambda g: g.energy)
    return out


def monodromy_angle(model: RotatingModel) -> float:
    """theta with exp(-iAT) = exp(-i theta) I; raises if the monodromy is not scalar."""
    u = np.asarray(monodromy(model))
    c = np.trace(u) / u.shape[0]
    if max_norm(u - c * np.eye(u.shape[0])) > 1e-9:
        raise CyclicityError("drive monodromy is not a global phase; no single-valued frame of this form")
    return principal_angle(-np.angle(c))


def _static_frame(model: RotatingModel):
    groups = energy_groups(model)
    vectors = np.hstack([g.states for g in groups])
    values = np.concatenate([[g.energy] * g.dimension for g in groups])
    return vectors, values


def instantaneous_frame(model: RotatingModel, t: float) -> InstantaneousFrame:
    """Eigenvectors of H(t) as exp(-iAt) applied to the gauge-fixed eigenvectors of H~."""
    vectors, values = _static_frame(model)
    rotated = np.asarray(spectral_exp(model.drive, t)) @ vectors
    return InstantaneousFrame(float(t), rotated, values)


def single_valued_frame(model: RotatingModel, t: float) -> InstantaneousFrame:
    """Instantaneous frame times exp(i theta t / T), which closes after one period."""
    theta = monodromy_angle(model)
    frame = instantaneous_frame(model, t)
    return InstantaneousFrame(frame.time, frame.vectors * np.exp(1j * theta * t / model.period), frame.values)


def berry_connection(model: RotatingModel, group: EnergyGroup) -> np.ndarray:
    """Constant connection <n_a'|A|n_b'> - (theta/T) delta_ab of a group."""
    theta = monodromy_angle(model)
    v = group.states
    conn = v.conj().T @ np.asarray(model.drive) @ v - (theta / model.period) * np.eye(group.dimension)
    return as_hermitian(0.5 * (conn + conn.conj().T))


def berry_connection_numeric(model: RotatingModel, group: EnergyGroup, t: float, step: float | None = None) -> np.ndarray:
    """i <n_a(t)| d/dt |n_b(t)> of the single-valued frame by central differences."""
    if step is None:
        step = 1e-6 * model.period
    theta = monodromy_angle(model)
    period = model.period

    def frame(s):
        return np.asarray(spectral_exp(model.drive, s)) @ group.states * np.exp(1j * theta * s / period)

    derivative = (frame(t + step) - frame(t - step)) / (2.0 * step)
    return 1j * frame(t).conj().T @ derivative


def _group(model: RotatingModel, which) -> EnergyGroup:
    if isinstance(which, EnergyGroup):
        return which
    groups = energy_groups(model)
    if not 0 <= which < len(groups):
        raise ValidationError(f"group index {which} out of range 0..{len(groups) - 1}")
    return groups[which]


def berry_phase(model: RotatingModel, index) -> float:
    """Berry phase <n'|A|n'> T - theta of a non-degenerate level, principal value.

    ``index`` is a position in :func:`energy_groups` or an EnergyGroup.
    """
    group = _group(model, index)
    if group.dimension != 1:
        raise ValidationError("level is degenerate; use wilczek_zee_holonomy")
    return principal_angle(float(berry_connection(model, group)[0, 0].real) * model.period)


def wilczek_zee_holonomy(model: RotatingModel, index, method: str = "ordered", tol: float = 1e-12) -> Holonomy:
    """T exp(i int A dt) over one period for a (possibly degenerate) level.

    The dynamical factor is exp(-i E T) on the level.
    """
    group = _group(model, index)
    conn = np.asarray(berry_connection(model, group))
    if method == "ordered":
        generator = 1j * conn
        geometric = ordered_exp(lambda t: generator, 0.0, model.period, tol)
    elif method == "spectral":
        geometric = spectral_exp(-conn, model.period)
    else:
        raise ValidationError(f"unknown holonomy method {method!r}")
    dynamical = np.exp(-1j * group.energy * model.period) * np.eye(group.dimension)
    return Holonomy(as_unitary(geometric), as_unitary(dynamical))


def _metric(model: RotatingModel, power: int) -> float:
    groups = energy_groups(model)
    if len(groups) < 2:
        raise ValidationError("adiabaticity metric undefined for a fully degenerate spectrum")
    h_dot = -1j * commutator(model.drive, model.tilde_h)
    worst = 0.0
    for i, gm in enumerate(groups):
        for gn in groups[i + 1:]:
            gap = abs(gn.energy - gm.energy)
            if gap <= 1e-9 * (1 + abs(gn.energy)):
                continue
            coupling = np.linalg.norm(gm.states.conj().T @ h_dot @ gn.states, 2)
            worst = max(worst, coupling / gap**power)
    return float(worst)


def adiabaticity_metric(model: RotatingModel) -> float:
    """max |<m| dH/dt |n>| / |E_n - E_m| at t = 0 over levels with distinct energies.

    Degenerate levels enter through the spectral norm of the coupling block,
    which does not depend on the basis chosen inside a level.
    """
    return _metric(model, 1)


def adiabaticity_metric_squared_gap(model: RotatingModel) -> float:
    """Same couplings divided by the squared gap (the textbook form)."""
    return _metric(model, 2)


def match_levels(vectors: Sequence[np.ndarray], groups: Sequence[EnergyGroup]) -> list[int]:
    """For each vector, the index of the energy group it overlaps most."""
    out = []
    for v in vectors:
        v = np.asarray(v) / np.linalg.norm(v)
        weights = [float(np.linalg.norm(g.states.conj().T @ v) ** 2) for g in groups]
        out.append(int(np.argmax(weights)))
    return out
