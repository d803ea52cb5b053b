import numpy as np
import pytest

from processor.errors import LatticeError, MemoryGuardError, ParameterRangeError
from processor.qubit.pauli import (
    PauliString,
    PauliSum,
    QubitState,
    pauli_mul,
    sigma_minus,
    sigma_plus,
    z_string,
)

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, 1j], [-1j, 0]], dtype=complex)
Z = np.diag([-1, 1]).astype(complex)


@pytest.mark.parametrize("letter, matrix", [("X", X), ("Y", Y), ("Z", Z)])
def test_single_letter_matrices(letter, matrix):
    np.testing.assert_array_equal(PauliSum.single(letter, 0).to_dense(1), matrix)


def test_product_table_matches_matrices():
    for left, right in [("X", "Y"), ("Y", "Z"), ("Z", "X"), ("Y", "X")]:
        product = pauli_mul(PauliString(1, ((0, left),)), PauliString(1, ((0, right),)))
        expected = PauliSum.single(left, 0).to_dense(1) @ PauliSum.single(right, 0).to_dense(1)
        np.testing.assert_allclose(PauliSum([product]).to_dense(1), expected)


def test_sigma_plus_raises_down_to_up():
    vacuum = QubitState.vacuum(1).vector
    np.testing.assert_array_equal(sigma_plus(0).apply(vacuum), [0, 1])
    np.testing.assert_array_equal(sigma_minus(0).apply(vacuum), [0, 0])
    np.testing.assert_array_equal(z_string([0]).apply(vacuum), [-1, 0])


def test_little_endian_order():
    state = QubitState.vacuum(3).vector
    raised = sigma_plus(2).apply(state)
    assert raised[4] == 1


def test_apply_matches_sparse():
    rng = np.random.default_rng(5)
    operator = (sigma_plus(0) * z_string([1]) * sigma_minus(2) + PauliSum.single("Y", 1, 0.3)).simplify()
    vector = rng.normal(size=8) + 1j * rng.normal(size=8)
    np.testing.assert_allclose(operator.apply(vector), operator.to_sparse(3) @ vector, atol=1e-14)


def test_commutators():
    x, y = PauliSum.single("X", 0), PauliSum.single("Y", 0)
    commutator = x.commutator(y)
    assert commutator.terms == {((0, "Z"),): 2j}
    assert x.anticommutator(y).is_zero()
    assert PauliSum.single("X", 0).commutator(PauliSum.single("Y", 1)).is_zero()


def test_adjoint_and_simplify():
    term = PauliSum([PauliString(1j, ((0, "X"), (2, "Z")))])
    assert term.adjoint().terms == {((0, "X"), (2, "Z")): -1j}
    assert (term - term).simplify().terms == {}
    assert term.max_site() == 2


def test_string_validation():
    with pytest.raises(ParameterRangeError):
        PauliString(1, ((0, "Q"),))
    with pytest.raises(ParameterRangeError):
        PauliString(1, ((0, "X"), (0, "Z")))
    with pytest.raises(LatticeError):
        PauliString(1, ((3, "X"),)).action(2)


def test_identity_letters_are_dropped():
    assert PauliString(2, ((0, "I"), (1, "X"))).letters == ((1, "X"),)


def test_memory_guard(monkeypatch):
    monkeypatch.setattr("utils.common.MAX_QUBITS", 4)
    with pytest.raises(MemoryGuardError):
        QubitState.vacuum(5)
    with pytest.raises(MemoryGuardError):
        PauliSum.single("X", 0).to_sparse(6)


def test_qubit_state_validation():
    with pytest.raises(LatticeError):
        QubitState(np.zeros(3), 2)
    assert QubitState.basis(2, 3).norm() == 1.0
