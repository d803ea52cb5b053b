import math

import numpy as np
import pytest
import scipy.linalg as sla

from processor.automaton.core import AutomatonParams, Boundary, SpinorState
from processor.automaton.dirac import build_band_unitary, evolve
from processor.automaton.hamiltonians import (
    CheckStatus,
    discrete_exponential_check,
    emergent_h,
    interpolating_h,
    locality_profile,
    three_point_step,
    trajectory_residual,
)
from processor.errors import BoundaryError, NonHermitianError, ParameterRangeError


@pytest.fixture
def random_state():
    rng = np.random.default_rng(11)
    return SpinorState(rng.normal(size=(16, 2)) + 1j * rng.normal(size=(16, 2))).normalized()


@pytest.mark.parametrize("theta", [0.0, math.pi / 10, math.pi / 8, math.pi / 4, math.pi / 2])
def test_emergent_h_is_hermitian(theta):
    dense = emergent_h(AutomatonParams(theta, 8)).to_dense()
    assert np.max(np.abs(dense - dense.conj().T)) <= 1e-12


def test_emergent_h_blocks():
    params = AutomatonParams(math.pi / 8, 8)
    h = emergent_h(params)
    s, c = params.s, params.c
    np.testing.assert_allclose(h.h_zero, c * np.array([[0, 1], [1, 0]]), atol=1e-15)
    np.testing.assert_allclose(h.h_minus, 0.5j * np.diag([s, -s]), atol=1e-15)
    np.testing.assert_allclose(h.h_plus, h.h_minus.conj().T, atol=1e-15)


@pytest.mark.parametrize("theta", [math.pi / 10, math.pi / 8, math.pi / 4])
def test_trajectory_residual(theta, random_state):
    assert trajectory_residual(AutomatonParams(theta, 16), random_state, 20) <= 1e-12


def test_trajectory_residual_needs_two_steps(random_state):
    with pytest.raises(ParameterRangeError):
        trajectory_residual(AutomatonParams(0.3, 16), random_state, 1)


def test_three_point_step_both_directions(random_state):
    params = AutomatonParams(math.pi / 8, 16)
    h = emergent_h(params)
    history = evolve(build_band_unitary(params), random_state, 2)
    forward = three_point_step(history[1], history[0], h, "forward")
    backward = three_point_step(history[1], history[2], h, "backward")
    assert np.max(np.abs(forward.amplitudes - history[2].amplitudes)) <= 1e-12
    assert np.max(np.abs(backward.amplitudes - history[0].amplitudes)) <= 1e-12


def test_exponential_map_branch_classification(caplog):
    params = AutomatonParams(math.pi / 8, 16)
    assert discrete_exponential_check(params, 0.0).status is CheckStatus.PASS
    assert discrete_exponential_check(params, math.pi / 4).status is CheckStatus.PASS
    with caplog.at_level("INFO"):
        report = discrete_exponential_check(params, 3 * math.pi / 4)
    assert report.status is CheckStatus.EXPECTED_FAIL
    assert report.s_cos_phi < 0
    assert "Principal arcsin branch" in caplog.text


@pytest.mark.parametrize("theta", [math.pi / 8, math.pi / 4])
def test_interpolating_h_generates_step(theta):
    params = AutomatonParams(theta, 32)
    h = interpolating_h(params, threads=2)
    dense_u = build_band_unitary(params).to_dense()
    assert np.max(np.abs(h.dense - h.dense.conj().T)) <= 1e-10
    assert np.max(np.abs(sla.expm(-1j * h.dense) - dense_u)) <= 1e-10


def test_interpolating_h_independent_of_threads():
    params = AutomatonParams(math.pi / 8, 16)
    np.testing.assert_array_equal(interpolating_h(params, threads=1).dense, interpolating_h(params, threads=4).dense)


def test_interpolating_h_needs_periodic_lattice():
    with pytest.raises(BoundaryError):
        interpolating_h(AutomatonParams(math.pi / 8, 16, Boundary.OPEN))


def test_interpolating_h_is_nonlocal_and_decays_massless():
    params = AutomatonParams(math.pi / 2, 64)
    profile = interpolating_h(params).couplings.set_index("offset")["max_coupling"]
    for r in range(1, 9):
        assert 0.8 < r * profile[r] < 1.25


def test_locality_profile_of_emergent_h_is_nearest_neighbour():
    dense = emergent_h(AutomatonParams(math.pi / 8, 16)).to_dense()
    profile = locality_profile(dense, 1e-12)
    assert profile.max_offset == 1


def test_locality_profile_rejects_non_hermitian():
    matrix = np.zeros((4, 4), dtype=complex)
    matrix[0, 2] = 1.0
    with pytest.raises(NonHermitianError):
        locality_profile(matrix, 1e-12)
