import math

import numpy as np
import pytest

from processor.automaton.core import AutomatonParams, Boundary, SpinorState
from processor.automaton.dirac import build_band_unitary, evolve, evolve_two_particle, two_particle_from_singles
from processor.errors import BoundaryError, LatticeError
from processor.fock.sectors import embed_single, embed_two, extract_single, extract_two
from processor.qubit.jordan_wigner import (
    anticommutation_residuals,
    emergent_h_qubit,
    excitation_number,
    gate_generators,
    gate_unitaries_qubit,
    jw_fermion,
    majorana_fields,
    majorana_p_observables_1d,
    mqca_evolve,
    mqca_step,
    mqca_step_matrix,
    p_observable,
    spin_model_h,
    string_identity_check,
    vacuum_theorem_check,
)
from processor.qubit.pauli import PauliSum, QubitState, sigma_plus


def random_spinor(n_sites, seed):
    rng = np.random.default_rng(seed)
    return SpinorState(rng.normal(size=(n_sites, 2)) + 1j * rng.normal(size=(n_sites, 2))).normalized()


@pytest.mark.parametrize("n_q", [2, 5, 8])
def test_anticommutation_relations(n_q):
    mixed, paired = anticommutation_residuals(n_q)
    assert mixed <= 1e-14
    assert paired <= 1e-14


def test_field_sign_counts_occupied_modes_below():
    # basis index 0b011: modes 0 and 1 occupied; phi_2^dag picks up (+1)
    created = jw_fermion(2, True, 3).apply(QubitState.basis(3, 0b011).vector)
    assert created[0b111] == pytest.approx(1.0)
    # phi_1 on 0b011 removes mode 1 past one occupied mode
    removed = jw_fermion(1, False, 3).apply(QubitState.basis(3, 0b011).vector)
    assert removed[0b001] == pytest.approx(-1.0)


@pytest.mark.parametrize("j", [0, 1, 2])
@pytest.mark.parametrize("l", [1, 2, 3, 4])
def test_string_identity(j, l):
    assert string_identity_check(j, l, 8) <= 1e-12


def test_string_identity_rejects_out_of_range():
    with pytest.raises(LatticeError):
        string_identity_check(5, 4, 8)


def test_majorana_fields_are_hermitian_and_square_to_one():
    for field in majorana_fields(2, 4):
        assert (field - field.adjoint()).simplify().is_zero()
        assert (field * field - PauliSum.identity()).simplify().is_zero()


@pytest.mark.parametrize("j, l", [(0, 1), (0, 3), (2, 2)])
def test_majorana_p_identity(j, l):
    report = majorana_p_observables_1d(j, l, 8)
    assert report.worst <= 1e-12


def test_p_observables_sharing_a_slot_anticommute():
    first, second = p_observable(1, 3, 6), p_observable(1, 5, 6)
    assert first.anticommutator(second).is_zero()
    assert p_observable(1, 3, 6).commutator(p_observable(5, 3, 6)).max_coeff() > 0.5
    assert p_observable(1, 3, 6).commutator(p_observable(3, 1, 6)).is_zero()


@pytest.mark.parametrize("n_q", [1, 2, 4, 6])
def test_vacuum_theorem(n_q):
    report = vacuum_theorem_check(n_q)
    assert report.passed
    assert report.kernel_dimension == 1


def test_gates_act_as_field_matrices_on_one_excitation():
    params = AutomatonParams(math.pi / 8, 4)
    s, c = params.s, params.c
    for n in range(4):
        gate_a, gate_b = gate_unitaries_qubit(params, n, 8)
        a_modes = [1 << ((2 * n - 1) % 8), 1 << (2 * n)]
        b_modes = [1 << (2 * n), 1 << (2 * n + 1)]
        np.testing.assert_allclose(gate_a[np.ix_(a_modes, a_modes)], [[c, 1j * s], [1j * s, c]], atol=1e-12)
        np.testing.assert_allclose(gate_b[np.ix_(b_modes, b_modes)], [[0, -1j], [-1j, 0]], atol=1e-12)


def test_gate_generators_need_even_register():
    with pytest.raises(LatticeError):
        gate_generators(5)


def test_step_on_one_excitation_matches_band_unitary():
    params = AutomatonParams(math.pi / 8, 3)
    step = mqca_step_matrix(params)
    singles = [1 << j for j in range(6)]
    np.testing.assert_allclose(step[np.ix_(singles, singles)], build_band_unitary(params).to_dense(), atol=1e-12)
    np.testing.assert_allclose(step.conj().T @ step, np.eye(64), atol=1e-12)


def test_step_conserves_excitation_number():
    params = AutomatonParams(math.pi / 4, 3)
    step = mqca_step_matrix(params)
    counts = np.diag(excitation_number(6))
    assert np.max(np.abs(counts @ step - step @ counts)) <= 1e-12


@pytest.mark.parametrize("theta", [math.pi / 8, math.pi / 4])
def test_sector_equivalence(theta):
    params = AutomatonParams(theta, 6)
    single = random_spinor(6, 1)
    qubits = mqca_evolve(params, QubitState(embed_single(single), 12), 10)
    expected = evolve(build_band_unitary(params), single, 10)[-1]
    assert np.max(np.abs(extract_single(qubits.vector, 12).amplitudes - expected.amplitudes)) <= 1e-10

    pair = two_particle_from_singles(random_spinor(6, 2), random_spinor(6, 3))
    found = extract_two(mqca_evolve(params, QubitState(embed_two(pair), 12), 10).vector, 12)
    expected_pair = evolve_two_particle(pair, params, 10)
    assert np.max(np.abs(found.amplitudes - expected_pair.amplitudes)) <= 1e-10


def test_mqca_step_requires_matching_periodic_register():
    with pytest.raises(LatticeError):
        mqca_step(AutomatonParams(0.3, 3), QubitState.vacuum(4))
    with pytest.raises(BoundaryError):
        mqca_step(AutomatonParams(0.3, 2, Boundary.OPEN), QubitState.vacuum(4))


def test_vacuum_is_invariant_under_step():
    params = AutomatonParams(math.pi / 8, 3)
    vacuum = QubitState.vacuum(6)
    np.testing.assert_allclose(mqca_step(params, vacuum).vector, vacuum.vector, atol=1e-15)


@pytest.mark.parametrize("theta", [math.pi / 10, math.pi / 8, math.pi / 2])
@pytest.mark.parametrize("n_q", [4, 6, 8])
def test_spin_model_equals_jordan_wigner_image(theta, n_q):
    params = AutomatonParams(theta, n_q // 2)
    spin = spin_model_h(params, n_q)
    fermion = emergent_h_qubit(params, n_q).to_dense(n_q)
    assert np.max(np.abs(spin - fermion)) <= 1e-12
    assert np.max(np.abs(spin - spin.conj().T)) <= 1e-12


def test_spin_model_register_size():
    with pytest.raises(LatticeError):
        spin_model_h(AutomatonParams(0.3, 2), 5)


def test_creation_on_vacuum_is_local():
    vacuum = QubitState.vacuum(4).vector
    for n in range(4):
        np.testing.assert_allclose(jw_fermion(n, True, 4).apply(vacuum), sigma_plus(n).apply(vacuum))
