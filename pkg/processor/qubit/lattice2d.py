"""Self-adjoint Jordan-Wigner dressing on a small two-dimensional patch.

Sites are numbered row-major, s = y * width + x. Site s owns two qubits: the
sigma-qubit 2s carries the Dirac mode phi_s and the tau-qubit 2s + 1 carries
the auxiliary mode theta_s. All 2S modes are represented faithfully by the
ordinary chain encoding of ``jordan_wigner`` in that total order; the
two-dimensional construction is checked on top of it.

The phase alpha_m^(n) is pi exactly for sites m in the lower half-plane seen
from n (negative x axis included). Under row-major order these are the sites
preceding n, so Phi(n) is a plain product of Z letters and squares to one.
"""

# Standard library imports
import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

# Third-party imports
import numpy as np

# Local application imports
from processor.errors import LatticeError, LinkOrientationError, NonCommutingLinksError
from processor.qubit.jordan_wigner import jw_fermion, jw_phase_factor, majorana_fields, p_commutation_residuals
from processor.qubit.pauli import PauliString, PauliSum, QubitState, sigma_minus, sigma_plus, z_string
from utils.common import max_abs

# Configure logger for this module
logger = logging.getLogger(__name__)

MAX_SITES = 7
Vector2 = Tuple[int, int]


@dataclass(frozen=True)
class Lattice2D:
    width: int
    height: int

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise LatticeError(f"Lattice dimensions must be positive, got {self.width}x{self.height}")
        if self.width * self.height > MAX_SITES:
            raise LatticeError(f"At most {MAX_SITES} sites fit the dense oracle, got {self.width * self.height}")

    @property
    def n_sites(self) -> int:
        return self.width * self.height

    @property
    def n_qubits(self) -> int:
        return 2 * self.n_sites

    def position(self, site: int) -> Vector2:
        self.check_site(site)
        return site % self.width, site // self.width

    def site(self, x: int, y: int) -> int:
        if not (0 <= x < self.width and 0 <= y < self.height):
            raise LatticeError(f"Position ({x}, {y}) outside {self.width}x{self.height} lattice")
        return y * self.width + x

    def contains(self, x: int, y: int) -> bool:
        return 0 <= x < self.width and 0 <= y < self.height

    def check_site(self, site: int) -> None:
        if not 0 <= site < self.n_sites:
            raise LatticeError(f"Site {site} outside lattice of {self.n_sites} sites")

    @staticmethod
    def sigma_qubit(site: int) -> int:
        return 2 * site

    @staticmethod
    def tau_qubit(site: int) -> int:
        return 2 * site + 1


def step_phase(k: Vector2) -> float:
    """0 on the upper half-plane including the positive x axis, pi elsewhere.

    Raises:
        LatticeError: For the zero vector.
    """
    kx, ky = k
    if kx == 0 and ky == 0:
        raise LatticeError("step_phase is undefined for the zero vector")
    return 0.0 if (ky > 0 or (ky == 0 and kx > 0)) else math.pi


def pair_phase(m: int, n: int, lattice: Lattice2D) -> float:
    """alpha_m^(n): step_phase(m - n), and 0 on the diagonal."""
    if m == n:
        lattice.check_site(m)
        return 0.0
    (mx, my), (nx, ny) = lattice.position(m), lattice.position(n)
    return step_phase((mx - nx, my - ny))


def phase_factor_2d(n: int, lattice: Lattice2D) -> PauliSum:
    """Phi(n) = exp[i sum_m (phi^dag phi + theta^dag theta)_m alpha_m^(n)] as Z letters."""
    lattice.check_site(n)
    qubits: List[int] = []
    for m in range(lattice.n_sites):
        if pair_phase(m, n, lattice) == math.pi:
            qubits.extend([lattice.sigma_qubit(m), lattice.tau_qubit(m)])
    # each (-Z) pair contributes (+1) overall
    return z_string(qubits)


def dirac_field(n: int, dagger: bool, lattice: Lattice2D) -> PauliSum:
    return jw_fermion(lattice.sigma_qubit(n), dagger, lattice.n_qubits)


def auxiliary_field(n: int, dagger: bool, lattice: Lattice2D) -> PauliSum:
    return jw_fermion(lattice.tau_qubit(n), dagger, lattice.n_qubits)


@dataclass(frozen=True, eq=False)
class DressedOperators:
    sigma_plus: PauliSum
    tau_plus: PauliSum
    tau_one: PauliSum
    tau_two: PauliSum
    commutation_residual: float
    anticommutation_residual: float
    exchange_residual: float

    @property
    def worst(self) -> float:
        return max(self.commutation_residual, self.anticommutation_residual, self.exchange_residual)


def dressed_operators_2d(n: int, lattice: Lattice2D) -> DressedOperators:
    """sigma_n^+ = phi_n^dag Phi(n) and tau_n^+ = theta_n^dag Phi(n), with their checks.

    Residuals are taken against every other site m:
      [sigma_n^+, sigma_m^+] = 0 and [sigma_n^+, sigma_m^-] = 0 (dressed operators commute);
      {phi_n, phi_m^dag} = delta_nm and {phi_n, phi_m} = 0 (bare fields anticommute);
      phi_n Phi(m) = Phi(m) phi_n e^{i alpha_n^(m)}.
    """
    lattice.check_site(n)
    phase = phase_factor_2d(n, lattice)
    sigma_n = (dirac_field(n, True, lattice) * phase).simplify()
    tau_n = (auxiliary_field(n, True, lattice) * phase).simplify()
    theta_one, theta_two = majorana_fields(lattice.tau_qubit(n), lattice.n_qubits)
    commute = anticommute = exchange = 0.0
    phi_n = dirac_field(n, False, lattice)
    for m in range(lattice.n_sites):
        phase_m = phase_factor_2d(m, lattice)
        phi_m = dirac_field(m, False, lattice)
        sign = math.cos(pair_phase(n, m, lattice))
        exchange = max(exchange, (phi_n * phase_m - phase_m * phi_n * sign).simplify().max_coeff())
        delta = PauliSum.identity() if m == n else PauliSum()
        anticommute = max(anticommute,
                          (phi_n.anticommutator(phi_m.adjoint()) - delta).simplify().max_coeff(),
                          phi_n.anticommutator(phi_m).max_coeff())
        if m != n:
            sigma_m = (dirac_field(m, True, lattice) * phase_m).simplify()
            commute = max(commute, sigma_n.commutator(sigma_m).max_coeff(),
                          sigma_n.commutator(sigma_m.adjoint()).max_coeff())
    return DressedOperators(
        sigma_plus=sigma_n,
        tau_plus=tau_n,
        tau_one=(theta_one * phase).simplify(),
        tau_two=(theta_two * phase).simplify(),
        commutation_residual=commute,
        anticommutation_residual=anticommute,
        exchange_residual=exchange,
    )


def p_observable_2d(n: int, m: int, lattice: Lattice2D) -> PauliSum:
    """P_nm = i theta^1_n theta^2_m as a Pauli sum."""
    if n == m:
        raise LatticeError("P observables need two distinct sites")
    lattice.check_site(n)
    lattice.check_site(m)
    first, _ = majorana_fields(lattice.tau_qubit(n), lattice.n_qubits)
    _, second = majorana_fields(lattice.tau_qubit(m), lattice.n_qubits)
    return (first * second * 1j).simplify()


def p_observables_2d(n: int, m: int, lattice: Lattice2D) -> np.ndarray:
    """Dense Hermitian P_nm."""
    return p_observable_2d(n, m, lattice).to_dense(lattice.n_qubits)


def p_commutation_table_2d(lattice: Lattice2D) -> Tuple[float, float]:
    """(largest commutator among commuting pairs, largest anticommutator among the rest)."""
    family = [((n, m), p_observable_2d(n, m, lattice))
              for n in range(lattice.n_sites) for m in range(lattice.n_sites) if n != m]
    return p_commutation_residuals(family)


def alpha_antisymmetry_residual(lattice: Lattice2D) -> float:
    """max |exp(i alpha_m^(n)) + exp(i alpha_n^(m))| over distinct ordered pairs (0 when alpha differs by pi)."""
    worst = 0.0
    for n, m in itertools.permutations(range(lattice.n_sites), 2):
        worst = max(worst, abs(np.exp(1j * pair_phase(m, n, lattice)) + np.exp(1j * pair_phase(n, m, lattice))))
    return float(worst)


def chain_degeneration_residual(width: int) -> float:
    """On a 1 x width strip Phi(n) must equal the chain Jordan-Wigner string of mode 2n."""
    lattice = Lattice2D(width, 1)
    worst = 0.0
    for n in range(lattice.n_sites):
        chain = jw_phase_factor(lattice.sigma_qubit(n))
        worst = max(worst, (phase_factor_2d(n, lattice) - chain).simplify().max_coeff())
        dressed = (dirac_field(n, True, lattice) * phase_factor_2d(n, lattice)).simplify()
        worst = max(worst, (dressed - sigma_plus(lattice.sigma_qubit(n))).simplify().max_coeff())
    return worst


@dataclass(frozen=True)
class OrientedLinks:
    links: Tuple[Vector2, ...]
    pairs: Tuple[Tuple[int, int], ...]


def _orient(link: Vector2) -> Vector2:
    return link if step_phase(link) == 0.0 else (-link[0], -link[1])


def oriented_links(lattice: Lattice2D, link_set: Sequence[Vector2]) -> OrientedLinks:
    """Orient links into the upper half-plane, keep +l for each +-l, and validate.

    Raises:
        LatticeError: For an empty set or a zero link.
        LinkOrientationError: If two distinct links are parallel.
        NonCommutingLinksError: If two of the resulting P_{n,n+l} anticommute.
    """
    if not link_set:
        raise LatticeError("The link set is empty")
    oriented: List[Vector2] = []
    for link in link_set:
        candidate = _orient((int(link[0]), int(link[1])))
        if candidate not in oriented:
            oriented.append(candidate)
    for first, second in itertools.combinations(oriented, 2):
        if first[0] * second[1] - first[1] * second[0] == 0:
            raise LinkOrientationError(f"Links {first} and {second} are distinct but parallel")
    pairs: List[Tuple[int, int]] = []
    for link in oriented:
        for n in range(lattice.n_sites):
            x, y = lattice.position(n)
            if lattice.contains(x + link[0], y + link[1]):
                pairs.append((n, lattice.site(x + link[0], y + link[1])))
    observables = {pair: p_observable_2d(pair[0], pair[1], lattice) for pair in pairs}
    for first, second in itertools.combinations(pairs, 2):
        residual = observables[first].commutator(observables[second]).max_coeff()
        if residual > 1e-12:
            logger.error(f"P{first} and P{second} do not commute (residual {residual:.3e})")
            raise NonCommutingLinksError(f"P observables on site pairs {first} and {second} anticommute",
                                         pair=(first, second))
    return OrientedLinks(tuple(oriented), tuple(pairs))


def _reduced_density(vector: np.ndarray, n_qubits: int, keep: Sequence[int]) -> np.ndarray:
    # C-order reshape puts qubit q on axis n_qubits - 1 - q
    tensor = vector.reshape([2] * n_qubits)
    keep_axes = [n_qubits - 1 - q for q in sorted(keep, reverse=True)]
    traced = [axis for axis in range(n_qubits) if axis not in keep_axes]
    moved = np.transpose(tensor, keep_axes + traced).reshape(1 << len(keep), -1)
    return moved @ moved.conj().T


def _entropy(density: np.ndarray) -> float:
    values = np.linalg.eigvalsh(density)
    values = values[values > 1e-15]
    return float(-np.sum(values * np.log(values)))


@dataclass(frozen=True, eq=False)
class JointVacuum:
    state: QubitState
    lattice: Lattice2D
    links: OrientedLinks
    eigenvalues: Dict[Tuple[int, int], int]
    eigen_residuals: Dict[Tuple[int, int], float]
    annihilation_residual: float
    sigma_trace_distance: float
    tau_entropy: float
    entropies: Dict[int, float] = field(default_factory=dict)


def joint_vacuum_2d(lattice: Lattice2D, links: OrientedLinks) -> JointVacuum:
    """Common eigenvector of all P_{n,n+l} with the sigma part in the all-down state.

    The tau vacuum is projected with prod_k (1 + p_k P_k)/2 for the sign pattern
    of largest overlap; ties go to the first pattern with + before -.
    """
    n_qubits = lattice.n_qubits
    vacuum = QubitState.vacuum(n_qubits).vector
    observables = [p_observable_2d(n, m, lattice) for n, m in links.pairs]
    best_vector, best_signs, best_norm = None, None, -1.0
    for signs in itertools.product((1, -1), repeat=len(observables)):
        vector = vacuum
        for sign, observable in zip(signs, observables):
            vector = 0.5 * (vector + sign * observable.apply(vector))
        norm = float(np.linalg.norm(vector))
        if norm > best_norm + 1e-12:
            best_vector, best_signs, best_norm = vector, signs, norm
    if best_vector is None or best_norm < 1e-12:
        raise NonCommutingLinksError("No common eigenvector of the P family overlaps the vacuum")
    state = best_vector / best_norm
    eigenvalues = {pair: int(sign) for pair, sign in zip(links.pairs, best_signs)}
    residuals = {pair: float(np.linalg.norm(p.apply(state) - eigenvalues[pair] * state))
                 for pair, p in zip(links.pairs, observables)}
    annihilation = max(float(np.linalg.norm(dirac_field(n, False, lattice).apply(state)))
                       for n in range(lattice.n_sites))
    sigma_qubits = [lattice.sigma_qubit(n) for n in range(lattice.n_sites)]
    sigma_density = _reduced_density(state, n_qubits, sigma_qubits)
    target = np.zeros_like(sigma_density)
    target[0, 0] = 1.0
    trace_distance = 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(sigma_density - target))))
    entropies = {n: _entropy(_reduced_density(state, n_qubits, [lattice.tau_qubit(n)]))
                 for n in range(lattice.n_sites)}
    for pair, sign in eigenvalues.items():
        logger.debug(f"P{pair} eigenvalue {sign:+d}")
    return JointVacuum(
        state=QubitState(state, n_qubits),
        lattice=lattice,
        links=links,
        eigenvalues=eigenvalues,
        eigen_residuals=residuals,
        annihilation_residual=annihilation,
        sigma_trace_distance=trace_distance,
        tau_entropy=max(entropies.values()),
        entropies=entropies,
    )


@dataclass(frozen=True)
class LocalityIdentityReport:
    operator_residual: float
    vacuum_residual: float
    matrix_element_residual: float
    eigenvalue: int

    @property
    def worst(self) -> float:
        return max(self.operator_residual, self.vacuum_residual, self.matrix_element_residual)


def locality_identity_2d(n: int, link: Vector2, lattice: Lattice2D, vacuum: JointVacuum) -> LocalityIdentityReport:
    """Check the local qubit form of the hopping term phi_n^dag phi_{n+l} + h.c.

    Operator identity: phi_n^dag phi_m P_nm = -i sigma_n^+ sigma_m^- tau^1_n tau^2_m.
    On the P_nm = p eigenspace: phi_n^dag phi_m + h.c. =
    -p i (sigma_n^+ sigma_m^- - sigma_m^+ sigma_n^-) tau^1_n tau^2_m,
    checked on the vacuum and on every one-particle excitation phi_k^dag |vacuum>.

    Raises:
        LatticeError: If (n, n + l) is not one of the vacuum's oriented pairs.
    """
    x, y = lattice.position(n)
    if not lattice.contains(x + link[0], y + link[1]):
        raise LatticeError(f"Site {n} shifted by {link} leaves the lattice")
    m = lattice.site(x + link[0], y + link[1])
    if (n, m) not in vacuum.eigenvalues:
        raise LatticeError(f"Sites {n} and {m} are not joined by an oriented link of the vacuum")
    p_value = vacuum.eigenvalues[(n, m)]
    dressed_n, dressed_m = dressed_operators_2d(n, lattice), dressed_operators_2d(m, lattice)
    sigma_n_plus, sigma_m_plus = dressed_n.sigma_plus, dressed_m.sigma_plus
    taus = dressed_n.tau_one * dressed_m.tau_two
    hopping = (dirac_field(n, True, lattice) * dirac_field(m, False, lattice)).simplify()

    lhs = hopping * p_observable_2d(n, m, lattice)
    rhs = sigma_n_plus * sigma_m_plus.adjoint() * taus * (-1j)
    operator_residual = (lhs - rhs).simplify().max_coeff()

    full_hopping = (hopping + hopping.adjoint()).simplify()
    local_hopping = ((sigma_n_plus * sigma_m_plus.adjoint() - sigma_m_plus * sigma_n_plus.adjoint())
                     * taus * (-1j * p_value)).simplify()
    base = vacuum.state.vector
    trial_states = [base] + [dirac_field(k, True, lattice).apply(base) for k in range(lattice.n_sites)]
    vacuum_residual = max(float(np.linalg.norm(full_hopping.apply(v) - local_hopping.apply(v))) for v in trial_states)

    excitations = trial_states[1:]
    elements_full = np.array([[np.vdot(a, full_hopping.apply(b)) for b in excitations] for a in excitations])
    elements_local = np.array([[np.vdot(a, local_hopping.apply(b)) for b in excitations] for a in excitations])
    return LocalityIdentityReport(
        operator_residual=operator_residual,
        vacuum_residual=vacuum_residual,
        matrix_element_residual=max_abs(elements_full - elements_local),
        eigenvalue=p_value,
    )
