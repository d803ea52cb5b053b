"""Brute-force fermionic simulator over occupation bitmasks.

Nothing here touches Pauli operators: creation and annihilation are pure bit
arithmetic with the parity sign (-1)^(occupied modes below j), so agreement
with the qubit register is a check between two independent implementations.
"""

# Standard library imports
import logging
import math
from dataclasses import dataclass

# Third-party imports
import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply

# Local application imports
from processor.errors import LatticeError, NonUnitaryError
from processor.fock.sectors import sector_masks
from utils.common import check_dense_budget

# Configure logger for this module
logger = logging.getLogger(__name__)

UNITARITY_TOLERANCE = 1e-12
BRANCH_POINT_GAP = 1e-12


@dataclass(frozen=True, eq=False)
class FockState:
    """Dense amplitudes over the 2^M occupation bitmasks of M modes."""

    vector: np.ndarray
    n_modes: int

    def __post_init__(self):
        check_dense_budget(self.n_modes, "Fock state")
        vector = np.array(self.vector, dtype=complex)
        if vector.shape != (1 << self.n_modes,):
            raise LatticeError(f"Fock vector must have length {1 << self.n_modes}, got {vector.shape}")
        vector.flags.writeable = False
        object.__setattr__(self, "vector", vector)

    @classmethod
    def vacuum(cls, n_modes: int) -> "FockState":
        check_dense_budget(n_modes, "Fock state")
        vector = np.zeros(1 << n_modes, dtype=complex)
        vector[0] = 1.0
        return cls(vector, n_modes)

    def norm(self) -> float:
        return float(np.linalg.norm(self.vector))


@dataclass(frozen=True, eq=False)
class SectorAmplitudes:
    masks: np.ndarray
    amplitudes: np.ndarray

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def _ladder_action(mode: int, create: bool, n_modes: int):
    if not 0 <= mode < n_modes:
        raise LatticeError(f"Mode {mode} outside {n_modes} modes")
    basis = np.arange(1 << n_modes, dtype=np.int64)
    bit = 1 << mode
    occupied = (basis & bit) != 0
    valid = ~occupied if create else occupied
    sources = basis[valid]
    signs = (-1.0) ** np.bitwise_count(sources & (bit - 1))
    return sources, sources ^ bit, signs


def fermion_apply(state: FockState, mode: int, create: bool) -> FockState:
    """Apply a_mode^dag (create) or a_mode to a Fock state."""
    sources, targets, signs = _ladder_action(mode, create, state.n_modes)
    out = np.zeros_like(state.vector)
    out[targets] = signs * state.vector[sources]
    return FockState(out, state.n_modes)


def fermion_operator(mode: int, create: bool, n_modes: int) -> sp.csr_matrix:
    """Sparse matrix of a_mode^dag or a_mode."""
    check_dense_budget(n_modes, "Fock operator")
    sources, targets, signs = _ladder_action(mode, create, n_modes)
    dim = 1 << n_modes
    return sp.csr_matrix((signs.astype(complex), (targets, sources)), shape=(dim, dim))


def number_operator(n_modes: int) -> sp.csr_matrix:
    check_dense_budget(n_modes, "Fock operator")
    counts = np.bitwise_count(np.arange(1 << n_modes, dtype=np.int64)).astype(float)
    return sp.diags(counts).tocsr()


def quadratic_operator(matrix: np.ndarray) -> sp.csr_matrix:
    """sum_kl M_kl a_k^dag a_l as a sparse matrix."""
    matrix = np.asarray(matrix, dtype=complex)
    n_modes = matrix.shape[0]
    creators = [fermion_operator(k, True, n_modes) for k in range(n_modes)]
    annihilators = [fermion_operator(k, False, n_modes) for k in range(n_modes)]
    dim = 1 << n_modes
    total = sp.csr_matrix((dim, dim), dtype=complex)
    for k, l in zip(*np.nonzero(np.abs(matrix) > 0)):
        total = total + matrix[k, l] * (creators[k] @ annihilators[l])
    return total


def quadratic_energy(state: FockState, h_matrix: np.ndarray) -> float:
    """<a^dag h a> for a Hermitian one-body matrix h."""
    h_matrix = np.asarray(h_matrix, dtype=complex)
    if h_matrix.shape != (state.n_modes, state.n_modes):
        raise LatticeError(f"One-body matrix must be {state.n_modes}x{state.n_modes}, got {h_matrix.shape}")
    value = np.vdot(state.vector, quadratic_operator(h_matrix) @ state.vector)
    return float(np.real(value))


def bilinear_evolve(state: FockState, matrix: np.ndarray) -> FockState:
    """Apply the Fock unitary V with V a_j^dag V^dag = sum_i M_ij a_i^dag.

    V = exp(-i sum_kl K_kl a_k^dag a_l) with K = i log M, the principal
    logarithm taken from the complex Schur form of M.

    Raises:
        NonUnitaryError: If M is not unitary to 1e-12.
    """
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.shape != (state.n_modes, state.n_modes):
        raise LatticeError(f"Mode matrix must be {state.n_modes}x{state.n_modes}, got {matrix.shape}")
    deviation = np.max(np.abs(matrix.conj().T @ matrix - np.eye(state.n_modes)))
    if deviation > UNITARITY_TOLERANCE:
        raise NonUnitaryError(f"Mode matrix is not unitary (deviation {deviation:.3e})")
    triangular, vectors = sla.schur(matrix, output="complex")
    phases = np.angle(np.diag(triangular))
    at_branch = np.abs(phases) > math.pi - BRANCH_POINT_GAP
    if np.any(at_branch):
        logger.warning(f"{int(at_branch.sum())} mode eigenphases at the log branch point; "
                       f"perturbing by {BRANCH_POINT_GAP}")
        phases = np.where(at_branch, np.sign(phases) * (math.pi - BRANCH_POINT_GAP), phases)
    generator = vectors @ np.diag(-phases) @ vectors.conj().T
    hamiltonian = quadratic_operator(generator)
    evolved = expm_multiply(-1j * hamiltonian, state.vector)
    return FockState(evolved, state.n_modes)


def sector_project(state: FockState, particles: int) -> SectorAmplitudes:
    """Amplitudes on the basis states holding exactly ``particles`` fermions."""
    if not 0 <= particles <= state.n_modes:
        raise LatticeError(f"Particle number {particles} outside 0..{state.n_modes}")
    masks = sector_masks(state.n_modes, particles)
    return SectorAmplitudes(masks, state.vector[masks])


def sector_norms(state: FockState) -> np.ndarray:
    """Norm squared of every particle-number sector, indexed by particle number."""
    counts = np.bitwise_count(np.arange(1 << state.n_modes, dtype=np.int64))
    return np.bincount(counts, weights=np.abs(state.vector) ** 2, minlength=state.n_modes + 1)
