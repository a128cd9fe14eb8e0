"""
Dense complex linear algebra for small quantum systems.

Validated operator constructors, a gauge-fixed Hermitian eigensolver with
degeneracy grouping, spectral exponentials, and time-ordered exponentials
computed by classical fourth-order stepping with step halving.

All returned arrays are read-only copies.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

import numpy as np

from .errors import ConvergenceError, ValidationError

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-9
EIG_RESIDUAL_TOL = 1e-10

# relative margin for "largest component" ties in the eigenvector gauge
_GAUGE_TIE = 1e-9


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


def as_matrix(m) -> np.ndarray:
    """Return ``m`` as a read-only square complex matrix with finite entries."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise ValidationError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError("matrix has NaN or infinite entries")
    return _frozen(a)


def max_norm(m) -> float:
    """Largest absolute entry."""
    return float(np.max(np.abs(m))) if np.size(m) else 0.0


def hermiticity_defect(m) -> float:
    m = np.asarray(m)
    return max_norm(m - m.conj().T)


def unitarity_defect(m) -> float:
    m = np.asarray(m)
    return max_norm(m.conj().T @ m - np.eye(m.shape[0]))


def as_hermitian(m, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Validate Hermiticity to ``tol * max(1, |m|_max)`` and return a read-only copy."""
    a = as_matrix(m)
    defect = hermiticity_defect(a)
    if defect > tol * max(1.0, max_norm(a)):
        raise ValidationError(f"matrix is not Hermitian (defect {defect:.3e})")
    return a


def as_unitary(m, tol: float = UNITARY_TOL) -> np.ndarray:
    """Validate unitarity to ``tol`` in max-norm and return a read-only copy."""
    a = as_matrix(m)
    defect = unitarity_defect(a)
    if defect > tol:
        raise ValidationError(f"matrix is not unitary (defect {defect:.3e})")
    return a


def commutator(a, b) -> np.ndarray:
    a = np.asarray(a)
    b = np.asarray(b)
    return a @ b - b @ a


def fix_gauge(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-magnitude entry is real and positive.

    Entries within a relative 1e-9 of the maximum count as ties; the lowest
    index wins.
    """
    v = np.array(vectors, dtype=complex, copy=True)
    mags = np.abs(v)
    for k in range(v.shape[1]):
        col = mags[:, k]
        pivot = int(np.flatnonzero(col >= col.max() * (1.0 - _GAUGE_TIE))[0])
        z = v[pivot, k]
        v[:, k] *= np.conj(z) / abs(z)
        v[pivot, k] = abs(z)
    return v


def default_group_tol(values) -> float:
    """Degeneracy tolerance: 1e-9 times (spectral range + 1)."""
    values = np.asarray(values, dtype=float)
    spread = float(values.max() - values.min()) if values.size else 0.0
    return 1e-9 * (spread + 1.0)


def group_indices(values, tol: float) -> tuple[tuple[int, ...], ...]:
    """Partition ascending ``values`` into runs whose neighbours are within ``tol``."""
    groups: list[list[int]] = []
    for k, v in enumerate(values):
        if groups and v - values[k - 1] <= tol:
            groups[-1].append(k)
        else:
            groups.append([k])
    return tuple(tuple(g) for g in groups)


@dataclass(frozen=True)
class EigenSystem:
    """Ascending eigenvalues, gauge-fixed orthonormal eigenvectors (columns),
    and the partition of indices into degenerate clusters."""

    values: np.ndarray
    vectors: np.ndarray
    groups: tuple[tuple[int, ...], ...]
    group_tol: float

    def group_values(self) -> list[float]:
        return [float(np.mean(self.values[list(g)])) for g in self.groups]

    def group_vectors(self, i: int) -> np.ndarray:
        return self.vectors[:, list(self.groups[i])]

    def projector(self, i: int) -> np.ndarray:
        v = self.group_vectors(i)
        return v @ v.conj().T


def hermitian_eig(h, group_tol: float | None = None) -> EigenSystem:
    """Diagonalize a Hermitian matrix.

    Eigenvectors are gauge fixed with :func:`fix_gauge`; clusters closer than
    ``group_tol`` (default :func:`default_group_tol`) are grouped. The
    eigen-equation residual and orthonormality are certified before returning.
    """
    h = as_hermitian(h)
    if group_tol is not None and not group_tol > 0:
        raise ValidationError("group_tol must be positive")
    try:
        values, vectors = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigensolver failed: {exc}") from exc
    vectors = fix_gauge(vectors)

    scale = 1.0 + max_norm(h)
    residual = float(np.max(np.linalg.norm(h @ vectors - vectors * values, axis=0)))
    if residual > EIG_RESIDUAL_TOL * scale:
        raise ConvergenceError(f"eigen-equation residual {residual:.3e} too large", (residual,))
    ortho = max_norm(vectors.conj().T @ vectors - np.eye(len(values)))
    if ortho > EIG_RESIDUAL_TOL:
        raise ConvergenceError(f"eigenvectors not orthonormal ({ortho:.3e})", (ortho,))

    tol = default_group_tol(values) if group_tol is None else float(group_tol)
    vals = np.array(values, dtype=float)
    vals.setflags(write=False)
    return EigenSystem(vals, _frozen(vectors), group_indices(vals, tol), tol)


def spectral_exp(h, s: float) -> np.ndarray:
    """exp(-i h s) for Hermitian ``h``, built from its eigendecomposition."""
    if not np.isfinite(s):
        raise ValidationError("exponent scale must be finite")
    es = hermitian_eig(h)
    v = es.vectors
    return _frozen((v * np.exp(-1j * es.values * s)) @ v.conj().T)


def rk4_step_factors(g_left, g_mid, g_right, dt: float) -> np.ndarray:
    """One-step RK4 propagators for the linear system dU/dt = G(t) U.

    Arguments are stacks (n, d, d) of the generator at the left end, midpoint
    and right end of each step. Returns the stack of step matrices R with
    U(t + dt) = R U(t) to fourth order.
    """
    eye = np.eye(g_left.shape[-1])
    k1 = g_left
    k2 = g_mid @ (eye + 0.5 * dt * k1)
    k3 = g_mid @ (eye + 0.5 * dt * k2)
    k4 = g_right @ (eye + dt * k3)
    return eye + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def accumulate(steps: np.ndarray, start: np.ndarray | None = None) -> np.ndarray:
    """Prefix products P[k] = R[k-1] ... R[0] P[0], with P[0] = ``start`` (default I)."""
    n, d, _ = steps.shape
    out = np.empty((n + 1,) + (np.shape(start) if start is not None else (d, d)), dtype=complex)
    out[0] = np.eye(d) if start is None else start
    for k in range(n):
        np.matmul(steps[k], out[k], out=out[k + 1])
    return out


def chain(steps: np.ndarray, start: np.ndarray | None = None) -> np.ndarray:
    """Ordered product R[n-1] ... R[0] applied to ``start`` (default I)."""
    out = np.eye(steps.shape[-1], dtype=complex) if start is None else np.asarray(start, dtype=complex)
    for r in steps:
        out = r @ out
    return out


class RK4Grid:
    """Uniform RK4 discretization of dU/dt = G(t) U on [t0, t1] with ``n`` steps.

    Step matrices are produced in chunks so memory stays bounded on fine grids.
    """

    chunk = 8192

    def __init__(self, sample: Callable[[np.ndarray], np.ndarray], t0: float, t1: float, n: int):
        self.sample = sample
        self.t0 = t0
        self.t1 = t1
        self.n = n
        self.dt = (t1 - t0) / n

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n + 1)

    def step_chunks(self) -> Iterator[tuple[np.ndarray, np.ndarray]]:
        """Yield (generator at left grid points, step matrices) chunk by chunk."""
        for start in range(0, self.n, self.chunk):
            stop = min(start + self.chunk, self.n)
            fine = self.t0 + self.dt * 0.5 * np.arange(2 * start, 2 * stop + 1)
            g = np.asarray(self.sample(fine), dtype=complex)
            yield g[0:-1:2], rk4_step_factors(g[0:-1:2], g[1::2], g[2::2], self.dt)

    def product(self) -> np.ndarray:
        out = None
        for _, steps in self.step_chunks():
            out = chain(steps, out)
        return out


def rk4_refinements(
    sample: Callable[[np.ndarray], np.ndarray],
    t0: float,
    t1: float,
    n_initial: int = 16,
    max_depth: int = 20,
) -> Iterator[RK4Grid]:
    """Yield RK4 grids with n, 2n, 4n, ... steps.

    ``sample`` maps an array of times to the stacked generator values.
    Raises ConvergenceError once ``max_depth`` halvings are exhausted; the
    caller decides when to stop consuming.
    """
    n = n_initial
    for _ in range(max_depth + 1):
        yield RK4Grid(sample, t0, t1, n)
        n *= 2
    raise ConvergenceError(f"no convergence after {max_depth} step halvings")


def _sampler(generator, vectorized: bool):
    if vectorized:
        return generator
    return lambda ts: np.stack([np.asarray(generator(t), dtype=complex) for t in ts])


def ordered_exp(
    generator: Callable,
    t0: float,
    t1: float,
    tol: float = 1e-10,
    *,
    max_depth: int = 20,
    vectorized: bool = False,
) -> np.ndarray:
    """Time-ordered exponential T exp(int_{t0}^{t1} G(t) dt), later times on the left.

    Halves the RK4 step until two successive results differ by less than
    ``tol`` in max-norm and returns the finer one. With ``vectorized=True``
    the generator receives an array of times and returns a (n, d, d) stack.
    """
    if not tol > 0:
        raise ValidationError("tol must be positive")
    if t1 < t0:
        raise ValidationError("ordered_exp requires t1 >= t0")
    sample = _sampler(generator, vectorized)
    if t1 == t0:
        d = np.asarray(sample(np.array([t0])))[0].shape[0]
        return _frozen(np.eye(d))
    previous = None
    history: list[float] = []
    try:
        for grid in rk4_refinements(sample, t0, t1, max_depth=max_depth):
            current = grid.product()
            if previous is not None:
                history.append(max_norm(current - previous))
                if history[-1] < tol:
                    return _frozen(current)
            previous = current
    except ConvergenceError as exc:
        raise ConvergenceError(str(exc), history[-2:]) from None
    raise AssertionError("unreachable")


def random_hermitian(dim: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """Gaussian Hermitian matrix, mostly for tests and demos."""
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * 0.5 * (z + z.conj().T)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def subspace_distance(a: Sequence, b: Sequence) -> float:
    """Max-norm distance between orthogonal projectors onto the column spans of a and b."""
    qa, _ = np.linalg.qr(np.asarray(a, dtype=complex))
    qb, _ = np.linalg.qr(np.asarray(b, dtype=complex))
    return max_norm(qa @ qa.conj().T - qb @ qb.conj().T)
