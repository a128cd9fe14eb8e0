import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.linalg import expm

from phaselab import reference as ref
from phaselab.errors import ConvergenceError, ValidationError
from phaselab.linalg import (
    as_hermitian,
    as_unitary,
    fix_gauge,
    hermitian_eig,
    max_norm,
    ordered_exp,
    random_hermitian,
    random_unitary,
    spectral_exp,
    subspace_distance,
)
from phaselab.phases import angle_distance, principal_angle


def test_identity_is_one_group():
    es = hermitian_eig(np.eye(4), 1e-9)
    np.testing.assert_allclose(es.values, np.ones(4))
    assert es.groups == ((0, 1, 2, 3),)


def test_diagonal_grouping():
    es = hermitian_eig(np.diag([-2 / 3, 0, 1 / 3, 1 / 3]), 1e-9)
    assert [len(g) for g in es.groups] == [1, 1, 2]


def test_p_matrix_gamma_one_spectrum():
    # the 3x3 lower block is circulant: diagonal 0, off-diagonal -1/3
    es = hermitian_eig(ref.printed_p_matrix(1.0, 0.0, 0.0))
    np.testing.assert_allclose(es.values, [-2 / 3, 0, 1 / 3, 1 / 3], atol=1e-12)


def test_rejects_non_hermitian():
    with pytest.raises(ValidationError):
        hermitian_eig(np.array([[0, 1], [0, 0]]))
    with pytest.raises(ValidationError):
        as_hermitian(np.array([[1, np.nan], [np.nan, 1]]))
    with pytest.raises(ValidationError):
        as_unitary(2 * np.eye(2))


def test_outputs_are_read_only():
    es = hermitian_eig(np.diag([1.0, 2.0]))
    with pytest.raises(ValueError):
        es.vectors[0, 0] = 3


def test_spectral_exp_special_values():
    np.testing.assert_allclose(spectral_exp(np.diag([1.0, 2.0]), 0.0), np.eye(2))
    w = 0.7
    a = 0.5 * w * np.diag([3.0, -1.0, -1.0, -1.0])
    np.testing.assert_allclose(spectral_exp(a, 2 * math.pi / w), -np.eye(4), atol=1e-12)
    sz = 0.5 * np.diag([1.0, -1.0])
    np.testing.assert_allclose(spectral_exp(sz, 2 * math.pi), -np.eye(2), atol=1e-12)


def test_ordered_exp_constant_and_zero_generator(rng):
    g = -1j * random_hermitian(3, rng)
    np.testing.assert_allclose(ordered_exp(lambda t: g, 0.0, 1.3, 1e-12), expm(1.3 * g), atol=1e-11)
    np.testing.assert_allclose(ordered_exp(lambda t: np.zeros((2, 2)), 0.0, 5.0), np.eye(2))


def test_ordered_exp_connection_matches_spectral():
    h, w = 0.4, 0.5
    conn = ref.x_connection_closed(h, w, 1) * np.eye(2)
    period = 2 * math.pi / w
    numeric = ordered_exp(lambda t: 1j * conn, 0.0, period, 1e-12)
    np.testing.assert_allclose(numeric, spectral_exp(-conn, period), atol=1e-10)


def test_ordered_exp_time_ordering():
    # non-commuting piecewise generator: later times act on the left
    gx = -1j * np.array([[0, 1], [1, 0]], dtype=complex)
    gz = -1j * np.array([[1, 0], [0, -1]], dtype=complex)
    u = ordered_exp(lambda t: gx if t < 1.0 else gz, 0.0, 2.0, 1e-4, max_depth=16)
    # a discontinuous generator converges slowly; only check the ordering
    np.testing.assert_allclose(u, expm(gz) @ expm(gx), atol=1e-2)


def test_ordered_exp_reports_non_convergence():
    with pytest.raises(ConvergenceError) as info:
        ordered_exp(lambda t: -1j * np.array([[t * 50.0]]), 0.0, 1.0, 1e-14, max_depth=2)
    assert info.value.residuals


def test_gauge_largest_component_real_positive():
    v = fix_gauge(np.array([[0.1j], [-0.9j], [0.3]]))
    assert v[1, 0].real > 0 and abs(v[1, 0].imag) < 1e-15


def test_gauge_tie_goes_to_lowest_index():
    v = fix_gauge(np.array([[1j], [-1j]]) / math.sqrt(2))
    assert v[0, 0].real > 0 and abs(v[0, 0].imag) < 1e-15


@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_eig_reconstructs(dim, seed):
    h = random_hermitian(dim, np.random.default_rng(seed))
    es = hermitian_eig(h)
    v = np.asarray(es.vectors)
    assert max_norm(v @ np.diag(es.values) @ v.conj().T - h) < 1e-10
    assert np.all(np.diff(es.values) >= 0)


@given(st.integers(2, 5), st.integers(0, 2**32 - 1), st.floats(-3, 3))
def test_spectral_exp_matches_expm(dim, seed, s):
    h = random_hermitian(dim, np.random.default_rng(seed))
    assert max_norm(spectral_exp(h, s) - expm(-1j * h * s)) < 1e-10


@given(st.integers(0, 2**32 - 1))
def test_eig_basis_invariance(seed):
    rng = np.random.default_rng(seed)
    h = random_hermitian(4, rng)
    v = random_unitary(4, rng)
    a = hermitian_eig(h)
    b = hermitian_eig(v.conj().T @ h @ v)
    np.testing.assert_allclose(a.values, b.values, atol=1e-10)
    for i in range(len(a.groups)):
        assert subspace_distance(v.conj().T @ a.group_vectors(i), b.group_vectors(i)) < 1e-8


@given(st.floats(-100, 100, allow_nan=False))
def test_principal_angle_range(x):
    y = principal_angle(x)
    assert -math.pi < y <= math.pi
    assert angle_distance(x, y) < 1e-9


def test_principal_angle_snaps_to_pi():
    assert principal_angle(-math.pi) == pytest.approx(math.pi)
    assert principal_angle(-math.pi + 1e-12) == pytest.approx(math.pi)
    assert principal_angle(3 * math.pi) == pytest.approx(math.pi)
