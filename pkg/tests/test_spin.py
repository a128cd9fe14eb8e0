import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from phaselab import reference as ref
from phaselab.errors import ValidationError
from phaselab.holonomy import frame_generator
from phaselab.linalg import commutator, max_norm
from phaselab.spin import (
    ModelParams,
    basis_index,
    basis_state,
    collective_spin,
    hamiltonian_at,
    lmg_hamiltonian,
    lmg_hamiltonian_pairwise,
    make_model,
    paper_basis_permutation,
    pauli_string,
    to_printed_basis,
)

params = st.tuples(st.floats(-2, 3), st.floats(-2, 2), st.floats(0.05, 3))


def test_pauli_strings():
    np.testing.assert_allclose(pauli_string(1, "z", 1), np.diag([1, -1]))
    v = basis_state("010")
    np.testing.assert_allclose(pauli_string(3, "z", 2) @ v, -v)
    np.testing.assert_allclose(pauli_string(2, "x", 1) @ basis_state("00"), basis_state("10"))
    with pytest.raises(ValidationError):
        pauli_string(3, "z", 4)
    with pytest.raises(ValidationError):
        pauli_string(3, "w", 1)


def test_collective_spin_values():
    sz = collective_spin(3, "z")
    v = basis_state("000")
    np.testing.assert_allclose(sz @ v, 1.5 * v)
    w = basis_state("011")
    assert np.vdot(w, sz @ w).real == pytest.approx(-0.5)
    np.testing.assert_allclose(collective_spin(1, "x"), 0.5 * np.array([[0, 1], [1, 0]]))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_spin_algebra(n):
    s = {a: np.asarray(collective_spin(n, a)) for a in "xyz"}
    for a, b, c in ("xyz", "yzx", "zxy"):
        assert max_norm(commutator(s[a], s[b]) - 1j * s[c]) < 1e-12


def test_hamiltonian_entries():
    g, h = 0.7, 0.4
    ht = lmg_hamiltonian(g, h)
    e = lambda a, b: np.vdot(basis_state(a), ht @ basis_state(b))
    assert e("000", "000") == pytest.approx(-1.5 * h)
    assert e("000", "011") == pytest.approx((g - 1) / 6)
    assert e("011", "101") == pytest.approx(-(g + 1) / 6)


@given(st.floats(-3, 3), st.floats(-3, 3))
def test_two_constructions_agree(g, h):
    assert max_norm(lmg_hamiltonian(g, h) - lmg_hamiltonian_pairwise(g, h)) < 1e-12


def test_printed_ordering():
    perm = paper_basis_permutation()
    assert perm[0] == 0 and perm[1] == 3
    assert basis_index("011") == 3


@given(params)
def test_drive_blocks(p):
    g, h, w = p
    z = to_printed_basis(make_model(g, h, w, "z").drive)
    np.testing.assert_allclose(z[:4, :4], ref.printed_z_drive_block(w), atol=1e-14)
    x = to_printed_basis(make_model(g, h, w, "x").drive)
    np.testing.assert_allclose(x, ref.printed_x_drive(w), atol=1e-14)
    assert x[0, 5] == pytest.approx(w / 2)


@given(params)
def test_frame_generator_block_form(p):
    g, h, w = p
    b = to_printed_basis(frame_generator(make_model(g, h, w, "z")))
    np.testing.assert_allclose(b[:4, :4], ref.printed_p_matrix(g, h, w), atol=1e-13)
    np.testing.assert_allclose(b[4:, 4:], ref.printed_p_matrix(g, -h, -w), atol=1e-13)
    assert max_norm(b[:4, 4:]) < 1e-14
    assert b[0, 0].real == pytest.approx(-1.5 * (h + w))
    bx = to_printed_basis(frame_generator(make_model(g, h, w, "x")))
    assert bx[0, 5].real == pytest.approx(-w / 2)


def test_period():
    assert make_model(0.5, 0.3, 0.5).period == pytest.approx(4 * math.pi)


@given(params, st.floats(0, 1))
def test_isospectral_family(p, frac):
    model = make_model(*p)
    ht = hamiltonian_at(model, frac * model.period)
    np.testing.assert_allclose(np.linalg.eigvalsh(ht), np.linalg.eigvalsh(model.tilde_h), atol=1e-10)


def test_hamiltonian_periodic():
    model = make_model(0.5, 0.3, 0.7, "x")
    np.testing.assert_allclose(hamiltonian_at(model, 0.0), model.tilde_h)
    assert max_norm(hamiltonian_at(model, model.period) - model.tilde_h) < 1e-12


def test_params_validation():
    with pytest.raises(ValidationError):
        ModelParams(0.5, 0.3, 0.0)
    with pytest.raises(ValidationError):
        ModelParams(0.5, 0.3, 1.0, axis="y")
    with pytest.raises(ValidationError):
        ModelParams(float("nan"), 0.3, 1.0)
