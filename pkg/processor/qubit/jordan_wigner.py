"""Jordan-Wigner realisation of the automaton fields on a qubit chain.

Field mode j sits on qubit j and phi_j = prod_{k<j}(-Z_k) sigma^-_j, so the
sign picked up by phi_j on a basis state is (-1)^(number of occupied modes
below j), the same convention as the occupation-number oracle.

Gates are Jordan-Wigner images of the field gates,

    A_n = exp[+i theta (phi_{2n}^dag phi_{2n-1} + h.c.)]
    B_n = exp[-(i pi / 2)(phi_{2n+1}^dag phi_{2n} + h.c.)]

which act on the one-excitation sector exactly as the Margolus matrices.
"""

# Standard library imports
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Tuple

# Third-party imports
import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

# Local application imports
from processor.automaton.core import AutomatonParams, Boundary
from processor.automaton.hamiltonians import emergent_h
from processor.errors import BoundaryError, LatticeError, ParameterRangeError
from processor.qubit.pauli import PauliString, PauliSum, QubitState, sigma_minus, sigma_plus, z_string
from utils.common import check_dense_budget, max_abs

# Configure logger for this module
logger = logging.getLogger(__name__)


def _check_mode(j: int, n_q: int) -> None:
    if not 0 <= j < n_q:
        raise LatticeError(f"Mode {j} outside register of {n_q} qubits")


def jw_phase_factor(j: int) -> PauliSum:
    """Phi(j) = exp(i pi sum_{k<j} n_k) = prod_{k<j}(-Z_k)."""
    return z_string(range(j), coeff=(-1.0) ** j)


def jw_fermion(j: int, dagger: bool, n_q: int) -> PauliSum:
    """phi_j (or phi_j^dag) as a sum of Pauli strings."""
    _check_mode(j, n_q)
    field = jw_phase_factor(j) * sigma_minus(j)
    return field.adjoint() if dagger else field


def majorana_fields(j: int, n_q: int) -> Tuple[PauliSum, PauliSum]:
    """(phi^1, phi^2) = (phi + phi^dag, i(phi^dag - phi)) of mode j."""
    annihilate, create = jw_fermion(j, False, n_q), jw_fermion(j, True, n_q)
    return (annihilate + create).simplify(), ((create - annihilate) * 1j).simplify()


def fermion_bilinear(p: int, q: int, n_q: int) -> PauliSum:
    """phi_p^dag phi_q."""
    return jw_fermion(p, True, n_q) * jw_fermion(q, False, n_q)


def quadratic_form(matrix: np.ndarray, n_q: int) -> PauliSum:
    """sum_pq M_pq phi_p^dag phi_q for a square matrix over n_q modes."""
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.shape != (n_q, n_q):
        raise LatticeError(f"Coefficient matrix must be {n_q}x{n_q}, got {matrix.shape}")
    total = PauliSum()
    for p, q in zip(*np.nonzero(np.abs(matrix) > 0)):
        total = total + fermion_bilinear(int(p), int(q), n_q) * matrix[p, q]
    return total.simplify()


def anticommutation_residuals(n_q: int) -> Tuple[float, float]:
    """Max deviation of {phi_i, phi_j^dag} from delta_ij and of {phi_i, phi_j} from 0 (dense)."""
    check_dense_budget(n_q, "anticommutator check")
    identity = sp.identity(1 << n_q, dtype=complex, format="csr")
    fields = [jw_fermion(j, False, n_q).to_sparse(n_q) for j in range(n_q)]
    mixed = paired = 0.0
    for i in range(n_q):
        for j in range(n_q):
            adjoint = fields[j].conj().T
            target = identity if i == j else 0 * identity
            mixed = max(mixed, max_abs(fields[i] @ adjoint + adjoint @ fields[i] - target))
            paired = max(paired, max_abs(fields[i] @ fields[j] + fields[j] @ fields[i]))
    return mixed, paired


def string_identity_check(j: int, l: int, n_q: int) -> float:
    """Residual of phi_{j+l}^dag phi_j = (-1)^(l+1) sigma^-_j S_j^l sigma^+_{j+l}.

    S_j^l is the product of Z over the qubits strictly between j and j + l.
    """
    if l < 1 or j < 0 or j + l >= n_q:
        raise LatticeError(f"String identity needs 0 <= j < j + l < n_q, got j={j}, l={l}, n_q={n_q}")
    lhs = fermion_bilinear(j + l, j, n_q)
    rhs = sigma_minus(j) * z_string(range(j + 1, j + l)) * sigma_plus(j + l) * ((-1.0) ** (l + 1))
    return max_abs((lhs - rhs).to_sparse(n_q))


def _hopping_generator(p: int, q: int, n_q: int) -> PauliSum:
    bilinear = fermion_bilinear(p, q, n_q)
    return (bilinear + bilinear.adjoint()).simplify()


@lru_cache(maxsize=32)
def gate_generators(n_q: int) -> Tuple[Tuple[PauliSum, ...], Tuple[PauliSum, ...]]:
    """Generators of the A row (modes 2n-1, 2n) and of the B row (modes 2n, 2n+1)."""
    if n_q < 2 or n_q % 2:
        raise LatticeError(f"A Dirac register needs an even number of qubits, got {n_q}")
    a_row = tuple(_hopping_generator(2 * n, (2 * n - 1) % n_q, n_q) for n in range(n_q // 2))
    b_row = tuple(_hopping_generator(2 * n + 1, 2 * n, n_q) for n in range(n_q // 2))
    return a_row, b_row


def _gate_matrix(generator: PauliSum, gamma: float, n_q: int) -> sp.csr_matrix:
    # generator^3 = generator, so exp(i gamma G) = I + (cos gamma - 1) G^2 + i sin gamma G
    g = generator.to_sparse(n_q)
    identity = sp.identity(1 << n_q, dtype=complex, format="csr")
    return sp.csr_matrix(identity + (math.cos(gamma) - 1) * (g @ g) + 1j * math.sin(gamma) * g)


def _apply_gate(generator: PauliSum, gamma: float, vector: np.ndarray) -> np.ndarray:
    once = generator.apply(vector)
    twice = generator.apply(once)
    return vector + (math.cos(gamma) - 1) * twice + 1j * math.sin(gamma) * once


def gate_unitaries_qubit(params: AutomatonParams, n: int, n_q: int, dense: bool = True):
    """(A_n, B_n) on the full register; sparse when ``dense`` is False."""
    if not 0 <= n < n_q // 2:
        raise LatticeError(f"Gate index {n} outside {n_q // 2} field sites")
    check_dense_budget(n_q, "gate unitary")
    a_row, b_row = gate_generators(n_q)
    gate_a = _gate_matrix(a_row[n], params.theta, n_q)
    gate_b = _gate_matrix(b_row[n], -math.pi / 2, n_q)
    if dense:
        return gate_a.toarray(), gate_b.toarray()
    return gate_a, gate_b


def _check_register(params: AutomatonParams, n_q: int) -> None:
    if params.boundary is not Boundary.PERIODIC:
        raise BoundaryError("The qubit automaton step closes the ring and needs a periodic lattice")
    if n_q != 2 * params.n_sites:
        raise LatticeError(f"Register of {n_q} qubits does not hold {params.n_sites} field sites")


def mqca_step(params: AutomatonParams, state: QubitState) -> QubitState:
    """One automaton step on the qubit register: the A row, then the B row."""
    return mqca_evolve(params, state, 1)


def mqca_evolve(params: AutomatonParams, state: QubitState, steps: int) -> QubitState:
    """Repeat ``mqca_step``; the norm is checked once at the end."""
    _check_register(params, state.n_qubits)
    if steps < 0:
        raise ParameterRangeError(f"steps must be non-negative, got {steps}")
    a_row, b_row = gate_generators(state.n_qubits)
    vector = state.vector.copy()
    for _ in range(steps):
        for generator in a_row:
            vector = _apply_gate(generator, params.theta, vector)
        for generator in b_row:
            vector = _apply_gate(generator, -math.pi / 2, vector)
    drift = abs(np.linalg.norm(vector) - state.norm())
    if drift > 1e-10:
        logger.warning(f"Qubit automaton norm drift {drift:.3e} after {steps} steps")
    return QubitState(vector, state.n_qubits)


def mqca_step_matrix(params: AutomatonParams) -> np.ndarray:
    """Dense single-step unitary, column by column (small registers only)."""
    n_q = 2 * params.n_sites
    check_dense_budget(n_q, "step matrix")
    dim = 1 << n_q
    columns = [mqca_step(params, QubitState.basis(n_q, index)).vector for index in range(dim)]
    return np.column_stack(columns)


def excitation_number(n_q: int) -> np.ndarray:
    """Diagonal of S = sum_n (1 + Z_n)/2, i.e. the Hamming weight of each basis index."""
    return np.bitwise_count(np.arange(1 << n_q, dtype=np.int64)).astype(float)


@dataclass(frozen=True)
class VacuumReport:
    n_qubits: int
    annihilation_residual: float
    kernel_dimension: int
    creation_identity_residual: float

    @property
    def passed(self) -> bool:
        return (self.annihilation_residual <= 1e-12 and self.kernel_dimension == 1
                and self.creation_identity_residual <= 1e-12)


def vacuum_theorem_check(n_q: int) -> VacuumReport:
    """Check that the all-down state is the unique state killed by every phi_n.

    The joint kernel of the phi_n equals the kernel of sum_n phi_n^dag phi_n,
    whose null space is computed densely.
    """
    if n_q < 1:
        raise LatticeError(f"n_q must be positive, got {n_q}")
    check_dense_budget(n_q, "vacuum check")
    vacuum = QubitState.vacuum(n_q).vector
    annihilation = creation = 0.0
    gram = sp.csr_matrix((1 << n_q, 1 << n_q), dtype=complex)
    for n in range(n_q):
        field = jw_fermion(n, False, n_q)
        annihilation = max(annihilation, float(np.linalg.norm(field.apply(vacuum))))
        created = jw_fermion(n, True, n_q).apply(vacuum)
        creation = max(creation, float(np.linalg.norm(created - sigma_plus(n).apply(vacuum))))
        matrix = field.to_sparse(n_q)
        gram = gram + matrix.conj().T @ matrix
    kernel = sla.null_space(gram.toarray())
    return VacuumReport(n_q, annihilation, int(kernel.shape[1]), creation)


def emergent_h_qubit(params: AutomatonParams, n_q: int) -> PauliSum:
    """Jordan-Wigner image of psi^dag H psi on an open chain of n_q modes."""
    open_params = AutomatonParams(params.theta, n_q // 2, Boundary.OPEN, params.units)
    return quadratic_form(emergent_h(open_params).to_dense(), n_q)


def spin_model_terms(params: AutomatonParams, n_q: int) -> PauliSum:
    """Spin form of the emergent Hamiltonian on an open chain.

    sum_n (-1)^n (i hbar s / 2 tau) sigma^+_n Z_{n-1} sigma^-_{n-2}
    + sum_m (hbar c / tau) sigma^+_{2m+1} sigma^-_{2m} + h.c.
    """
    if n_q < 4 or n_q % 2:
        raise LatticeError(f"The spin model needs an even register of at least 4 qubits, got {n_q}")
    units = params.units
    kinetic = 1j * units.hbar * params.s / (2 * units.tau)
    mass = units.hbar * params.c / units.tau
    terms = PauliSum()
    for n in range(2, n_q):
        terms = terms + sigma_plus(n) * z_string([n - 1]) * sigma_minus(n - 2) * (kinetic * (-1) ** n)
    for m in range(n_q // 2):
        terms = terms + sigma_plus(2 * m + 1) * sigma_minus(2 * m) * mass
    return (terms + terms.adjoint()).simplify()


def spin_model_h(params: AutomatonParams, n_q: int) -> np.ndarray:
    """Dense Hermitian spin-model Hamiltonian on n_q qubits."""
    check_dense_budget(n_q, "spin model")
    return spin_model_terms(params, n_q).to_dense(n_q)


def p_observable(i: int, j: int, n_q: int) -> PauliSum:
    """P_ij = i phi^1_i phi^2_j."""
    if i == j:
        raise LatticeError("P observables need two distinct modes")
    first, _ = majorana_fields(i, n_q)
    _, second = majorana_fields(j, n_q)
    return (first * second * 1j).simplify()


def p_commutation_residuals(observables: Sequence[Tuple[Tuple[int, int], PauliSum]]) -> Tuple[float, float]:
    """Largest commutator among pairs expected to commute and anticommutator among the rest.

    Two P observables anticommute exactly when they share one slot
    (same first index or same second index, but not both).
    """
    commute = anticommute = 0.0
    for a, (pair_a, p_a) in enumerate(observables):
        for pair_b, p_b in observables[a + 1:]:
            shared = int(pair_a[0] == pair_b[0]) + int(pair_a[1] == pair_b[1])
            if shared == 1:
                anticommute = max(anticommute, p_a.anticommutator(p_b).max_coeff())
            elif shared == 0:
                commute = max(commute, p_a.commutator(p_b).max_coeff())
    return commute, anticommute


@dataclass(frozen=True, eq=False)
class MajoranaReport:
    p_matrix: np.ndarray
    hermiticity_residual: float
    square_residual: float
    identity_residual: float
    commute_residual: float
    anticommute_residual: float

    @property
    def worst(self) -> float:
        return max(self.hermiticity_residual, self.square_residual, self.identity_residual,
                   self.commute_residual, self.anticommute_residual)


def majorana_p_observables_1d(j: int, l: int, n_q: int) -> MajoranaReport:
    """Dirac modes on even positions, auxiliary Majorana modes on odd ones.

    Checks P = P^dag, P^2 = I, the commutation table of the odd-mode P family and
    phi_{j+2l}^dag phi_j P_{j+2l+1,j+1} = -i sigma^-_j sigma^+_{j+2l} Y_{j+1} X_{j+2l+1}.
    """
    if j % 2 or j < 0 or l < 1 or j + 2 * l + 1 >= n_q:
        raise LatticeError(f"Need even j >= 0, l >= 1 and j + 2l + 1 < n_q; got j={j}, l={l}, n_q={n_q}")
    check_dense_budget(n_q, "Majorana check")
    p = p_observable(j + 2 * l + 1, j + 1, n_q)
    p_matrix = p.to_dense(n_q)
    identity = np.eye(1 << n_q)
    lhs = fermion_bilinear(j + 2 * l, j, n_q) * p
    rhs = (sigma_minus(j) * sigma_plus(j + 2 * l)
           * PauliSum([PauliString(-1j, ((j + 1, "Y"), (j + 2 * l + 1, "X")))]))
    odd_modes = range(1, n_q, 2)
    family = [((a, b), p_observable(a, b, n_q)) for a in odd_modes for b in odd_modes if a != b]
    commute, anticommute = p_commutation_residuals(family)
    return MajoranaReport(
        p_matrix=p_matrix,
        hermiticity_residual=float(np.max(np.abs(p_matrix - p_matrix.conj().T))),
        square_residual=float(np.max(np.abs(p_matrix @ p_matrix - identity))),
        identity_residual=max_abs((lhs - rhs).to_sparse(n_q)),
        commute_residual=commute,
        anticommute_residual=anticommute,
    )
