import math

import numpy as np
import pytest

from processor.automaton.core import (
    AutomatonParams,
    Boundary,
    Component,
    SpinorState,
    TwoParticleState,
    UnitSystem,
    coupling_from_mass,
    mode_from_index,
    mode_index,
    signed_site,
    site_coordinates,
)
from processor.errors import AutomatonError, LatticeError, ParameterRangeError


@pytest.mark.parametrize("m_ratio, expected_s", [(0.0, 1.0), (1.0, 0.0), (0.6, 0.8)])
def test_coupling_from_mass(m_ratio, expected_s):
    theta, c, s = coupling_from_mass(m_ratio)
    assert c == pytest.approx(m_ratio, abs=1e-15)
    assert s == pytest.approx(expected_s, abs=1e-12)
    assert math.cos(theta) == pytest.approx(m_ratio, abs=1e-12)


def test_coupling_from_mass_planck_limit_is_exact():
    theta, c, s = coupling_from_mass(1.0)
    assert theta == 0.0
    assert s == 0.0


@pytest.mark.parametrize("bad", [-0.1, 1.5, float("nan")])
def test_coupling_from_mass_rejects_out_of_range(bad):
    with pytest.raises(ParameterRangeError):
        coupling_from_mass(bad)


def test_params_massless_limit_is_exact():
    params = AutomatonParams(math.pi / 2, 8)
    assert params.c == 0.0
    assert params.s == 1.0
    assert params.zeta == 1.0
    assert params.compton_wavelength == math.inf


def test_params_spot_value_from_packet_caption():
    params = AutomatonParams(math.pi / 8, 64)
    assert params.m_ratio == pytest.approx(0.92388, abs=1e-5)
    assert params.zeta == pytest.approx(math.sin(math.pi / 8), abs=1e-15)
    assert params.n_modes == 128


def test_params_clamps_tiny_excursions_and_rejects_large_ones():
    assert AutomatonParams(-1e-13, 4).theta == 0.0
    assert AutomatonParams(math.pi / 2 + 1e-13, 4).theta == math.pi / 2
    with pytest.raises(ParameterRangeError):
        AutomatonParams(2.0, 4)
    with pytest.raises(LatticeError):
        AutomatonParams(0.3, 0)


def test_params_from_mass_ratio_roundtrip():
    params = AutomatonParams.from_mass_ratio(0.6, 16, Boundary.OPEN)
    assert params.m_ratio == pytest.approx(0.6, abs=1e-15)
    assert params.boundary is Boundary.OPEN
    assert params.with_sites(4).n_sites == 4


def test_unit_system_derived_constants():
    units = UnitSystem(a=2.0, tau=0.5, hbar=3.0)
    assert units.c_causal == 4.0
    assert units.m_planck == pytest.approx(3.0 / 8.0)
    with pytest.raises(ParameterRangeError):
        UnitSystem(a=0.0)


def test_errors_are_value_errors():
    assert issubclass(AutomatonError, ValueError)


def test_component_parse():
    assert Component.parse("+") is Component.PLUS
    assert Component.parse(-1) is Component.MINUS
    assert Component.MINUS.sign == -1
    with pytest.raises(ParameterRangeError):
        Component.parse("x")


def test_mode_index_roundtrip():
    for n in range(4):
        for alpha in Component:
            j = mode_index(n, alpha, 4)
            assert mode_from_index(j, 4) == (n, alpha)
    assert mode_index(3, "-", 4) == 7
    with pytest.raises(LatticeError):
        mode_index(4, "+", 4)


def test_signed_coordinates():
    assert signed_site(7, 8) == -1
    assert signed_site(4, 8) == -4
    np.testing.assert_array_equal(site_coordinates(4), [0, 1, -2, -1])


def test_spinor_state_is_read_only_and_normalises():
    state = SpinorState(np.ones((4, 2)))
    assert state.norm() == pytest.approx(math.sqrt(8))
    assert state.normalized().is_normalized()
    with pytest.raises(ValueError):
        state.amplitudes[0, 0] = 2.0


def test_spinor_state_validation():
    with pytest.raises(LatticeError):
        SpinorState(np.ones((4, 3)))
    with pytest.raises(ParameterRangeError):
        SpinorState(np.full((2, 2), np.nan))
    with pytest.raises(ParameterRangeError):
        SpinorState(np.zeros((2, 2))).normalized()


def test_spinor_modes_roundtrip():
    vector = np.arange(8, dtype=complex)
    state = SpinorState.from_modes(vector)
    assert state.amplitudes[1, 1] == 3
    np.testing.assert_array_equal(state.to_modes(), vector)


def test_localized_state():
    state = SpinorState.localized(8, 3, "-")
    assert state.component_probabilities()[3, 1] == 1.0
    assert state.site_probabilities().sum() == 1.0


def test_two_particle_state_site_probabilities():
    amps = np.zeros((4, 4), dtype=complex)
    amps[0, 3] = 1 / math.sqrt(2)
    amps[3, 0] = -1 / math.sqrt(2)
    state = TwoParticleState(amps)
    assert state.n_sites == 2
    assert state.norm() == pytest.approx(1.0)
    assert state.antisymmetry_residual() == 0.0
    probs = state.site_probabilities()
    assert probs[0, 1] == pytest.approx(0.5)
    assert probs[1, 0] == pytest.approx(0.5)
    with pytest.raises(LatticeError):
        TwoParticleState(np.zeros((3, 3)))
