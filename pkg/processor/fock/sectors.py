"""Occupation-number basis shared by the Fock oracle and the qubit register.

Bit j of a basis index is set when mode j is occupied (qubit j is up).
Amplitudes embed as

    single particle: amplitude(e_j) = psi_j
    two particles:   amplitude(e_i + e_j) = sqrt(2) Psi_ij   for i < j

which is the state sum_{i<j} sqrt(2) Psi_ij a_i^dag a_j^dag |0> and is
normalised whenever Psi is.
"""

# Standard library imports
import math

# Third-party imports
import numpy as np

# Local application imports
from processor.automaton.core import SpinorState, TwoParticleState
from processor.errors import LatticeError
from utils.common import check_dense_budget


def sector_masks(n_modes: int, weight: int) -> np.ndarray:
    """Basis indices with exactly ``weight`` occupied modes, ascending."""
    check_dense_budget(n_modes, "sector")
    basis = np.arange(1 << n_modes, dtype=np.int64)
    return basis[np.bitwise_count(basis) == weight]


def embed_single(state: SpinorState) -> np.ndarray:
    n_modes = 2 * state.n_sites
    check_dense_budget(n_modes, "single-particle embedding")
    vector = np.zeros(1 << n_modes, dtype=complex)
    vector[1 << np.arange(n_modes)] = state.to_modes()
    return vector


def extract_single(vector: np.ndarray, n_modes: int) -> SpinorState:
    vector = np.asarray(vector)
    if vector.size != 1 << n_modes:
        raise LatticeError(f"Vector of length {vector.size} does not match {n_modes} modes")
    return SpinorState.from_modes(vector[1 << np.arange(n_modes)])


def embed_two(state: TwoParticleState) -> np.ndarray:
    n_modes = state.n_modes
    check_dense_budget(n_modes, "two-particle embedding")
    vector = np.zeros(1 << n_modes, dtype=complex)
    rows, cols = np.triu_indices(n_modes, k=1)
    vector[(1 << rows) | (1 << cols)] = math.sqrt(2) * state.amplitudes[rows, cols]
    return vector


def extract_two(vector: np.ndarray, n_modes: int) -> TwoParticleState:
    vector = np.asarray(vector)
    if vector.size != 1 << n_modes:
        raise LatticeError(f"Vector of length {vector.size} does not match {n_modes} modes")
    rows, cols = np.triu_indices(n_modes, k=1)
    amps = np.zeros((n_modes, n_modes), dtype=complex)
    amps[rows, cols] = vector[(1 << rows) | (1 << cols)] / math.sqrt(2)
    return TwoParticleState(amps - amps.T)
