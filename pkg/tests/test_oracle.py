import math

import numpy as np
import pytest

from phaselab import reference as ref
from phaselab.errors import CyclicityError, ValidationError
from phaselab.holonomy import aa_phase, best_overlap, cyclic_states, degenerate_groups, frame_generator
from phaselab.linalg import max_norm, spectral_exp
from phaselab.oracle import (
    dynamical_phase_integral,
    evolution_operator,
    evolution_operators,
    geometric_phase_oracle,
    norm_drift,
    oracle_phases,
    propagate_state,
    total_phase,
)
from phaselab.phases import angle_distance
from phaselab.spin import RotatingModel, basis_state, from_printed_basis, make_model


def test_identity_at_zero():
    np.testing.assert_allclose(evolution_operator(make_model(0.5, 0.3, 0.5), 0.0), np.eye(8))


def test_static_hamiltonian_matches_spectral_exp():
    # independent check: with zero drive the propagator is exp(-i H~ s)
    base = make_model(0.5, 0.3, 0.5)
    still = RotatingModel(base.tilde_h, np.zeros((8, 8), dtype=complex), base.params, base.period)
    s = 3.7
    assert max_norm(evolution_operator(still, s) - spectral_exp(base.tilde_h, s)) < 1e-8


@pytest.mark.parametrize("axis", ["z", "x"])
def test_full_period_matches_factorization(axis):
    model = make_model(0.5, 0.3, 0.7, axis)
    expected = np.asarray(spectral_exp(model.drive, model.period)) @ np.asarray(
        spectral_exp(frame_generator(model), model.period)
    )
    assert max_norm(evolution_operator(model, model.period) - expected) < 1e-8


def test_total_phase_of_eigenstates():
    model = make_model(0.5, 0.3, 0.7)
    groups = cyclic_states(model)
    states = np.hstack([g.states for g in groups])
    res = oracle_phases(model, states)
    col = 0
    for g in groups:
        for _ in range(g.dimension):
            assert angle_distance(res.total[col], -math.pi - g.b_value * model.period) < 1e-8
            col += 1
    assert np.all(res.overlap > 1 - 1e-10)
    assert max_norm(res.propagator.conj().T @ res.propagator - np.eye(8)) < 1e-9


def test_gamma_one_decoupled_state():
    h, w = 0.5, 0.3
    model = make_model(1.0, h, w)
    psi = basis_state("000")
    period = model.period
    assert angle_distance(total_phase(model, psi), -math.pi + 1.5 * (h + w) * period) < 1e-8
    assert dynamical_phase_integral(model, psi) == pytest.approx(1.5 * h * period, abs=1e-6)
    assert angle_distance(geometric_phase_oracle(model, psi).geometric, 0.0) < 1e-6


def test_dynamical_phase_equals_expectation():
    model = make_model(2.0, 1.0, 0.5)
    for g in cyclic_states(model)[:3]:
        phi = g.states[:, 0]
        expected = -float(np.vdot(phi, model.tilde_h @ phi).real) * model.period
        assert dynamical_phase_integral(model, phi) == pytest.approx(expected, abs=1e-6)


def test_degenerate_group_members_share_total_phase():
    model = make_model(0.5, 0.4, 0.6, "x")
    for g in degenerate_groups(cyclic_states(model)):
        res = oracle_phases(model, g.states)
        assert angle_distance(res.total[0], res.total[1]) < 1e-6


def test_dynamical_phase_linear_in_hamiltonian():
    # at h = 0 the degenerate x-model states do not depend on a rescaling of H~
    base = make_model(0.5, 0.0, 0.6, "x")
    states = np.hstack([g.states for g in degenerate_groups(cyclic_states(base))])
    ref_dyn = oracle_phases(base, states).dynamical
    for c in (0.5, 2.0):
        scaled = RotatingModel(c * base.tilde_h, base.drive, base.params, base.period, base.symmetries)
        dyn = oracle_phases(scaled, states).dynamical
        np.testing.assert_allclose(dyn, c * ref_dyn, atol=1e-6)


def test_generic_point_matches_engine_and_closed_form():
    p = (0.5, 0.3, 0.2)
    model = make_model(*p)
    groups = cyclic_states(model)
    for index in (1, 2):
        v = np.zeros(8, dtype=complex)
        v[:4] = ref.z_cyclic_vector_closed(*p, index)
        k, _ = best_overlap(groups, from_printed_basis(v))
        got = geometric_phase_oracle(model, groups[k].states[:, 0]).geometric
        assert angle_distance(got, aa_phase(model, groups[k]).geometric) < 1e-6
        assert angle_distance(got, ref.aa_phase_closed(*p, index)) < 1e-6


def test_x_group_member_matches_holonomy_angle():
    g, h, w = 0.5, 0.5, 0.5
    model = make_model(g, h, w, "x")
    b1, _ = ref.x_spectrum_closed(g, h, w)
    grp = next(x for x in cyclic_states(model) if x.dimension == 2 and abs(x.b_value - b1) < 1e-9)
    got = geometric_phase_oracle(model, grp.states[:, 1]).geometric
    assert angle_distance(got, ref.x_holonomy_closed(h, w, 1)) < 1e-6


def test_non_cyclic_state_rejected():
    model = make_model(0.5, 0.3, 0.5)
    psi = (basis_state("000") + basis_state("011")) / math.sqrt(2)
    with pytest.raises(CyclicityError, match="not cyclic"):
        total_phase(model, psi)
    with pytest.raises(CyclicityError):
        oracle_phases(model, psi)


def test_input_validation():
    model = make_model(0.5, 0.3, 0.5)
    with pytest.raises(ValidationError):
        evolution_operator(model, -1.0)
    with pytest.raises(ValidationError):
        evolution_operator(model, 1.0, tol=0.0)
    with pytest.raises(ValidationError):
        oracle_phases(model, 2 * basis_state("000"))


def test_periodic_composition():
    model = make_model(0.5, 0.3, 0.7, "x")
    big_t = model.period
    u_t, u_big, u_shift = evolution_operators(model, [0.37 * big_t, big_t, 1.37 * big_t])
    assert max_norm(u_shift - u_t @ u_big) < 1e-7
    assert max_norm(u_t - evolution_operator(model, 0.37 * big_t)) < 1e-8


def test_propagate_state_and_drift():
    model = make_model(0.5, 0.3, 0.7)
    psi = basis_state("000")
    res = propagate_state(model, psi, 1.0, n_samples=3)
    assert abs(np.linalg.norm(res.final_state) - 1) < 1e-9
    assert len(res.trajectory_samples) == 3
    np.testing.assert_allclose(res.trajectory_samples[-1][1], res.final_state, atol=1e-9)
    assert norm_drift(model, psi) < 1e-9
