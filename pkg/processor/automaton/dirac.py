"""Single-step band unitary of the 1+1 dimensional Dirac automaton.

Conventions used throughout:

* amplitudes are arrays of shape (N, 2) with column 0 the + component;
* a band operator acts as (U psi)_m = a_minus psi_{m+1} + a_zero psi_m
  + a_plus psi_{m-1}, so the Dirac blocks send |n,+> to s|n-1,+> - ic|n,->;
* on a plane wave psi_m = v e^{i m phi} the operator reduces to the 2x2
  symbol a_minus e^{i phi} + a_zero + a_plus e^{-i phi}.
"""

# Standard library imports
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import List, NamedTuple, Optional, Sequence, Tuple, Union

# Third-party imports
import numpy as np
import pandas as pd
import scipy.sparse as sp
from scipy.optimize import minimize_scalar

# Local application imports
from processor.automaton.core import (
    AutomatonParams,
    Boundary,
    Component,
    SpinorState,
    TwoParticleState,
    site_coordinates,
)
from processor.errors import (
    BoundaryError,
    CommensurabilityError,
    LatticeError,
    ParallelStateError,
    ParameterRangeError,
)

# Configure logger for this module
logger = logging.getLogger(__name__)

NORM_DRIFT_TOLERANCE = 1e-10
COMMENSURABILITY_TOLERANCE = 1e-9
TIE_TOLERANCE = 1e-12

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)


class Direction(str, Enum):
    FORWARD = "forward"
    BACKWARD = "backward"


@dataclass(frozen=True, eq=False)
class BandOperator:
    """Nearest-neighbour block-tridiagonal operator on 2N modes."""

    a_minus: np.ndarray
    a_zero: np.ndarray
    a_plus: np.ndarray
    n_sites: int
    boundary: Boundary = Boundary.PERIODIC

    def __post_init__(self):
        for name in ("a_minus", "a_zero", "a_plus"):
            block = np.array(getattr(self, name), dtype=complex)
            if block.shape != (2, 2):
                raise LatticeError(f"Block {name} must be 2x2, got {block.shape}")
            block.flags.writeable = False
            object.__setattr__(self, name, block)
        object.__setattr__(self, "boundary", Boundary(self.boundary))

    def apply(self, amplitudes: np.ndarray) -> np.ndarray:
        """Apply to an array of shape (N, 2, ...); trailing axes are batch axes."""
        psi = np.asarray(amplitudes, dtype=complex)
        if psi.shape[:2] != (self.n_sites, 2):
            raise LatticeError(f"State of shape {psi.shape[:2]} does not match {self.n_sites} sites")
        if self.boundary is Boundary.PERIODIC:
            following = np.roll(psi, -1, axis=0)
            preceding = np.roll(psi, 1, axis=0)
        else:
            following = np.zeros_like(psi)
            following[:-1] = psi[1:]
            preceding = np.zeros_like(psi)
            preceding[1:] = psi[:-1]
        return (np.einsum("ab,nb...->na...", self.a_minus, following)
                + np.einsum("ab,nb...->na...", self.a_zero, psi)
                + np.einsum("ab,nb...->na...", self.a_plus, preceding))

    def apply_modes(self, matrix: np.ndarray) -> np.ndarray:
        """Apply to the first axis of an array of shape (2N, ...) in mode order."""
        matrix = np.asarray(matrix, dtype=complex)
        rest = matrix.shape[1:]
        out = self.apply(matrix.reshape((self.n_sites, 2) + rest))
        return out.reshape((2 * self.n_sites,) + rest)

    def adjoint(self) -> "BandOperator":
        return type(self)(self.a_plus.conj().T, self.a_zero.conj().T, self.a_minus.conj().T,
                          self.n_sites, self.boundary)

    def symbol(self, phi: float) -> np.ndarray:
        """2x2 matrix acting on plane waves of momentum phi."""
        return self.a_minus * np.exp(1j * phi) + self.a_zero + self.a_plus * np.exp(-1j * phi)

    def _shift(self, offset: int) -> sp.csr_matrix:
        rows = np.arange(self.n_sites)
        cols = rows + offset
        if self.boundary is Boundary.PERIODIC:
            cols = cols % self.n_sites
        else:
            keep = (cols >= 0) & (cols < self.n_sites)
            rows, cols = rows[keep], cols[keep]
        data = np.ones(rows.size, dtype=complex)
        return sp.csr_matrix((data, (rows, cols)), shape=(self.n_sites, self.n_sites))

    def to_sparse(self) -> sp.csr_matrix:
        identity = sp.identity(self.n_sites, dtype=complex, format="csr")
        matrix = (sp.kron(self._shift(1), self.a_minus)
                  + sp.kron(identity, self.a_zero)
                  + sp.kron(self._shift(-1), self.a_plus))
        return sp.csr_matrix(matrix)

    def to_dense(self) -> np.ndarray:
        return self.to_sparse().toarray()


class BandUnitary(BandOperator):
    """Band operator expected to be unitary (exactly so on periodic lattices)."""

    def unitarity_residual(self, require_exact: bool = False) -> float:
        """Return max |U^dag U - I|.

        Raises:
            BoundaryError: If require_exact is set on an open lattice, where
                the edge rows are not unitary.
        """
        if require_exact and self.boundary is Boundary.OPEN:
            raise BoundaryError("Open boundary breaks unitarity at the edges; use a periodic lattice")
        dense = self.to_dense()
        return float(np.max(np.abs(dense.conj().T @ dense - np.eye(dense.shape[0]))))


@dataclass(frozen=True, eq=False)
class GatePair:
    gate_a: np.ndarray
    gate_b: np.ndarray


@dataclass(frozen=True, eq=False)
class MomentumMode:
    """Momentum-space step at phase phi.

    eigenvalues[alpha] = exp(-i * sign(alpha) * energy) and eigenvectors[:, alpha]
    is the matching normalised spinor (alpha = 0 for +, 1 for -).
    """

    phi: float
    u_phi: np.ndarray
    energy: float
    xi: float
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def eigenphases(self) -> Tuple[float, float]:
        return self.energy, -self.energy


class Observables(NamedTuple):
    mean_x: float
    mean_p: float
    var_x: float


def build_band_unitary(params: AutomatonParams) -> BandUnitary:
    """Dirac blocks a_minus = diag(s, 0), a_zero = -ic sigma_x, a_plus = diag(0, s)."""
    s, c = params.s, params.c
    return BandUnitary(
        a_minus=np.array([[s, 0], [0, 0]], dtype=complex),
        a_zero=-1j * c * SIGMA_X,
        a_plus=np.array([[0, 0], [0, s]], dtype=complex),
        n_sites=params.n_sites,
        boundary=params.boundary,
    )


def apply_step(u: BandOperator, state: SpinorState,
               direction: Union[Direction, str] = Direction.FORWARD) -> SpinorState:
    """Advance (or, with Backward, rewind) a single-particle state by one step."""
    if state.n_sites != u.n_sites:
        raise LatticeError(f"State has {state.n_sites} sites, unitary has {u.n_sites}")
    operator = u if Direction(direction) is Direction.FORWARD else u.adjoint()
    return SpinorState(operator.apply(state.amplitudes))


def evolve(u: BandOperator, state: SpinorState, steps: int,
           direction: Union[Direction, str] = Direction.FORWARD) -> List[SpinorState]:
    """Return the trajectory [state, U state, ..., U^steps state].

    The norm is checked after every step; drift beyond 1e-10 is logged.
    """
    if steps < 0:
        raise ParameterRangeError(f"steps must be non-negative, got {steps}")
    operator = u if Direction(direction) is Direction.FORWARD else u.adjoint()
    if state.n_sites != u.n_sites:
        raise LatticeError(f"State has {state.n_sites} sites, unitary has {u.n_sites}")
    initial_norm = state.norm()
    history = [state]
    amps = state.amplitudes
    for t in range(1, steps + 1):
        amps = operator.apply(amps)
        current = SpinorState(amps)
        drift = abs(current.norm() - initial_norm)
        if drift > NORM_DRIFT_TOLERANCE:
            logger.warning(f"Norm drift {drift:.3e} at step {t}")
        history.append(current)
    return history


def step_displacement(u: BandOperator, state: SpinorState) -> float:
    """Mean position change <U^dag X U - X> over one step, in sites.

    Computed from the hops of U alone, so it does not depend on where the
    periodic lattice is cut. Its magnitude is at most s times the squared norm.
    """
    if state.n_sites != u.n_sites:
        raise LatticeError(f"State has {state.n_sites} sites, unitary has {u.n_sites}")
    hops = BandOperator(-u.a_minus, np.zeros((2, 2)), u.a_plus, u.n_sites, u.boundary)
    return float(np.real(np.vdot(u.apply(state.amplitudes), hops.apply(state.amplitudes))))


def _wrap_phase(phi: float) -> float:
    """Map phi into (-pi, pi]."""
    return math.pi - ((math.pi - phi) % (2 * math.pi))


def invariant_spinor(params: AutomatonParams, phi: float, alpha: Union[Component, str]) -> Tuple[np.ndarray, complex]:
    """Unit spinor v with u(phi) v = exp(-i alpha E) v, and that eigenvalue."""
    alpha = Component.parse(alpha)
    s, c = params.s, params.c
    xi = math.sqrt(max(0.0, 1.0 - (s * math.cos(phi)) ** 2))
    sin_term = s * math.sin(phi)
    first = np.array([alpha.sign * xi - sin_term, c], dtype=complex)
    second = np.array([c, sin_term + alpha.sign * xi], dtype=complex)
    first_norm, second_norm = np.linalg.norm(first), np.linalg.norm(second)
    if max(first_norm, second_norm) < 1e-14:
        # degenerate massless point: u(phi) is a multiple of the identity
        vector = np.array([0, 1] if alpha is Component.PLUS else [1, 0], dtype=complex)
    elif first_norm >= second_norm:
        vector = first / first_norm
    else:
        vector = second / second_norm
    eigenvalue = complex(s * math.cos(phi), -alpha.sign * xi)
    return vector, eigenvalue


def momentum_unitary(params: AutomatonParams, phi: float) -> MomentumMode:
    """Momentum-space unitary u(phi) = [[s e^{i phi}, -ic], [-ic, s e^{-i phi}]] and its eigensystem."""
    phi = _wrap_phase(float(phi))
    u_phi = build_band_unitary(params.with_sites(1)).symbol(phi)
    cos_energy = params.s * math.cos(phi)
    energy = math.acos(min(1.0, max(-1.0, cos_energy)))
    xi = math.sqrt(max(0.0, 1.0 - cos_energy ** 2))
    vectors, values = [], []
    for alpha in (Component.PLUS, Component.MINUS):
        vector, value = invariant_spinor(params, phi, alpha)
        vectors.append(vector)
        values.append(value)
    return MomentumMode(
        phi=phi,
        u_phi=u_phi,
        energy=energy,
        xi=xi,
        eigenvalues=np.array(values),
        eigenvectors=np.column_stack(vectors),
    )


def _require_periodic(params: AutomatonParams, what: str) -> None:
    if params.boundary is not Boundary.PERIODIC:
        raise BoundaryError(f"{what} requires a periodic lattice")


def invariant_state(params: AutomatonParams, phi: float, alpha: Union[Component, str]) -> SpinorState:
    """Plane-wave eigenstate of the full band unitary at momentum phi = 2 pi k / N.

    Raises:
        BoundaryError: On an open lattice.
        CommensurabilityError: If phi is not a multiple of 2 pi / N.
    """
    _require_periodic(params, "Invariant states")
    k = phi * params.n_sites / (2 * math.pi)
    if abs(k - round(k)) > COMMENSURABILITY_TOLERANCE:
        raise CommensurabilityError(f"phi={phi} is not a multiple of 2*pi/{params.n_sites}")
    phi = _wrap_phase(2 * math.pi * round(k) / params.n_sites)
    vector, _ = invariant_spinor(params, phi, alpha)
    wave = np.exp(1j * phi * np.arange(params.n_sites)) / math.sqrt(params.n_sites)
    return SpinorState(np.outer(wave, vector))


def dispersion_scan(params: AutomatonParams, n_samples: int) -> pd.DataFrame:
    """Tabulate E(phi) = arccos(s cos phi) and the group velocity on (-pi, pi].

    Returns:
        DataFrame with columns phi, energy, group_velocity.
    """
    if n_samples < 2:
        raise ParameterRangeError(f"n_samples must be at least 2, got {n_samples}")
    s = params.s
    phi = -np.pi + 2 * np.pi * (np.arange(n_samples) + 1) / n_samples
    cos_energy = np.clip(s * np.cos(phi), -1.0, 1.0)
    xi = np.sqrt(1.0 - cos_energy ** 2)
    safe_xi = np.where(xi > 0, xi, 1.0)
    # xi vanishes only in the massless case at phi = 0 or pi; use the one-sided slope
    velocity = np.where(xi > 0, s * np.sin(phi) / safe_xi, np.where(phi >= 0, s, -s))
    return pd.DataFrame({"phi": phi, "energy": np.arccos(cos_energy), "group_velocity": velocity})


def max_group_velocity(params: AutomatonParams) -> float:
    """Maximum of |dE/dphi| over the Brillouin zone (equal to zeta = s)."""
    s = params.s
    if s == 0.0:
        return 0.0

    def negative_speed(phi: float) -> float:
        xi = math.sqrt(max(1e-300, 1.0 - (s * math.cos(phi)) ** 2))
        return -abs(s * math.sin(phi) / xi)

    result = minimize_scalar(negative_speed, bounds=(0.0, math.pi), method="bounded",
                             options={"xatol": 1e-10})
    return float(-result.fun)


def gate_pair(params: AutomatonParams) -> GatePair:
    """Margolus gates A = [[c, is], [is, c]] and B = [[0, -i], [-i, 0]]."""
    s, c = params.s, params.c
    return GatePair(
        gate_a=np.array([[c, 1j * s], [1j * s, c]], dtype=complex),
        gate_b=np.array([[0, -1j], [-1j, 0]], dtype=complex),
    )


def margolus_step(params: AutomatonParams, state: SpinorState) -> SpinorState:
    """One step as two rows of two-mode gates.

    The A row acts on pairs (psi^-_{n-1}, psi^+_n), then the B row on
    (psi^+_n, psi^-_n). Acting on states this is the band unitary exactly;
    read as a Heisenberg update of the fields the order is B then A.
    """
    _require_periodic(params, "The Margolus decomposition")
    if params.n_sites % 2:
        raise LatticeError(f"Margolus pairing needs an even number of sites, got {params.n_sites}")
    if state.n_sites != params.n_sites:
        raise LatticeError(f"State has {state.n_sites} sites, parameters have {params.n_sites}")
    gates = gate_pair(params)
    a, b = gates.gate_a, gates.gate_b
    plus = state.amplitudes[:, 0]
    minus_prev = np.roll(state.amplitudes[:, 1], 1)
    new_minus_prev = a[0, 0] * minus_prev + a[0, 1] * plus
    new_plus = a[1, 0] * minus_prev + a[1, 1] * plus
    after_a = np.column_stack([new_plus, np.roll(new_minus_prev, -1)])
    return SpinorState(after_a @ b.T)


def lattice_coordinates(params: AutomatonParams) -> np.ndarray:
    """Site coordinates: signed on periodic lattices, plain indices on open ones."""
    if params.boundary is Boundary.PERIODIC:
        return site_coordinates(params.n_sites)
    return np.arange(params.n_sites)


def _displacement(params: AutomatonParams, center: float) -> np.ndarray:
    offsets = np.arange(params.n_sites) - center
    if params.boundary is Boundary.PERIODIC:
        n = params.n_sites
        offsets = (offsets + n / 2) % n - n / 2
    return offsets


def gaussian_packet(params: AutomatonParams, n0: float, delta: float, k: float,
                    sign: Union[Component, str] = Component.PLUS) -> SpinorState:
    """Normalised packet exp(2 pi i d / k - d^2 / 2 delta^2) (|+> +- |->), d = x - n0.

    On a periodic lattice d is the shortest displacement to the centre, so the
    carrier has no jump at the seam whether or not k divides N.

    Args:
        n0: Centre; negative values are measured from the end of a periodic lattice.
        delta: Width in sites, positive.
        k: Phase period in sites (carrier momentum 2 pi / k), nonzero.
        sign: Relative sign of the - component.
    """
    if not delta > 0:
        raise ParameterRangeError(f"delta must be positive, got {delta}")
    if k == 0:
        raise ParameterRangeError("k must be nonzero")
    sign = Component.parse(sign).sign
    d = _displacement(params, n0 % params.n_sites if params.boundary is Boundary.PERIODIC else n0)
    envelope = np.exp(2j * np.pi * d / k - d ** 2 / (2 * delta ** 2))
    return SpinorState(np.column_stack([envelope, sign * envelope])).normalized()


def double_slit_state(params: AutomatonParams, n: int) -> SpinorState:
    """Equal amplitudes 1/2 on both components at sites n and -n (mod N)."""
    if not 0 < n < params.n_sites / 2:
        raise ParameterRangeError(f"Slit offset must satisfy 0 < n < N/2, got {n}")
    amps = np.zeros((params.n_sites, 2), dtype=complex)
    amps[n, :] = 0.5
    amps[(-n) % params.n_sites, :] = 0.5
    return SpinorState(amps)


def _momentum_apply(params: AutomatonParams, amps: np.ndarray, spacing: float) -> np.ndarray:
    if params.boundary is Boundary.PERIODIC:
        following, preceding = np.roll(amps, -1, axis=0), np.roll(amps, 1, axis=0)
    else:
        following, preceding = np.zeros_like(amps), np.zeros_like(amps)
        following[:-1], preceding[1:] = amps[1:], amps[:-1]
    return -1j * params.units.hbar * (following - preceding) / (2 * spacing)


def position_momentum_expect(state: SpinorState, params: AutomatonParams,
                             spacing: Optional[float] = None) -> Observables:
    """Return (<X>, <P>, Var X) with X = d x and P the symmetric difference.

    Args:
        spacing: Effective site spacing d; defaults to the lattice spacing a.
    """
    d = params.units.a if spacing is None else spacing
    amps = state.amplitudes
    positions = d * lattice_coordinates(params)
    probs = state.site_probabilities()
    total = probs.sum()
    mean_x = float(np.dot(probs, positions) / total)
    var_x = float(np.dot(probs, (positions - mean_x) ** 2) / total)
    mean_p = float(np.real(np.vdot(amps, _momentum_apply(params, amps, d))) / total)
    return Observables(mean_x, mean_p, max(var_x, 0.0))


def component_observables(state: SpinorState, params: AutomatonParams,
                          spacing: Optional[float] = None) -> pd.DataFrame:
    """Per-component <X^alpha> and <P^alpha>; the rows sum to the totals."""
    d = params.units.a if spacing is None else spacing
    amps = state.amplitudes
    positions = d * lattice_coordinates(params)
    momentum = _momentum_apply(params, amps, d)
    total = float(np.sum(np.abs(amps) ** 2))
    rows = []
    for alpha in Component:
        column = amps[:, alpha]
        rows.append({
            "component": "+" if alpha is Component.PLUS else "-",
            "probability": float(np.sum(np.abs(column) ** 2)) / total,
            "mean_x": float(np.dot(np.abs(column) ** 2, positions)) / total,
            "mean_p": float(np.real(np.vdot(column, momentum[:, alpha]))) / total,
        })
    return pd.DataFrame(rows)


def commutator_expectation(state: SpinorState, params: AutomatonParams,
                           spacing: Optional[float] = None) -> float:
    """<[X, P]> / (i hbar); equals <(T+ + T-)/2> away from the periodic seam."""
    d = params.units.a if spacing is None else spacing
    amps = state.amplitudes
    positions = (d * lattice_coordinates(params))[:, None]
    commutator = positions * _momentum_apply(params, amps, d) - _momentum_apply(params, positions * amps, d)
    value = np.vdot(amps, commutator) / (1j * params.units.hbar)
    return float(np.real(value))


def chirality(state: SpinorState) -> float:
    """Fraction of the probability carried by the + component."""
    probs = state.component_probabilities()
    return float(probs[:, 0].sum() / probs.sum())


def light_cone_leakage(history: Sequence[SpinorState], params: AutomatonParams,
                       origin_sites: Sequence[int]) -> np.ndarray:
    """Probability outside the radius-t cone around the initial support, per step."""
    n = params.n_sites
    sites = np.arange(n)
    distance = np.full(n, np.inf)
    for origin in origin_sites:
        gap = np.abs(sites - origin)
        if params.boundary is Boundary.PERIODIC:
            gap = np.minimum(gap, n - gap)
        distance = np.minimum(distance, gap)
    leakage = np.empty(len(history))
    for t, state in enumerate(history):
        leakage[t] = state.site_probabilities()[distance > t].sum()
    return leakage


def two_particle_from_singles(psi_a: SpinorState, psi_b: SpinorState) -> TwoParticleState:
    """Normalised antisymmetrised product a_i b_j - a_j b_i.

    Raises:
        LatticeError: If the two states live on different lattices.
        ParallelStateError: If the antisymmetrisation vanishes.
    """
    if psi_a.n_sites != psi_b.n_sites:
        raise LatticeError(f"Single-particle states differ in size: {psi_a.n_sites} vs {psi_b.n_sites}")
    a, b = psi_a.to_modes(), psi_b.to_modes()
    amps = np.outer(a, b) - np.outer(b, a)
    norm = np.sqrt(np.sum(np.abs(amps) ** 2))
    if norm < 1e-12:
        raise ParallelStateError("Single-particle states are parallel; antisymmetrisation vanishes")
    return TwoParticleState(amps / norm)


def evolve_two_particle(state: TwoParticleState, params: AutomatonParams, steps: int,
                        u: Optional[BandOperator] = None) -> TwoParticleState:
    """Apply Psi -> U Psi U^T ``steps`` times, one band sweep per axis."""
    if state.n_sites != params.n_sites:
        raise LatticeError(f"State has {state.n_sites} sites, parameters have {params.n_sites}")
    if steps < 0:
        raise ParameterRangeError(f"steps must be non-negative, got {steps}")
    u = u or build_band_unitary(params)
    amps = state.amplitudes
    initial_norm = state.norm()
    for t in range(1, steps + 1):
        amps = u.apply_modes(u.apply_modes(amps).T).T
        drift = abs(np.sqrt(np.sum(np.abs(amps) ** 2)) - initial_norm)
        if drift > NORM_DRIFT_TOLERANCE:
            logger.warning(f"Two-particle norm drift {drift:.3e} at step {t}")
    return TwoParticleState(amps)


def typical_path(history: Sequence[SpinorState], params: AutomatonParams) -> pd.DataFrame:
    """Maximum-probability site and mean position per step.

    Ties within a relative 1e-12 go to the smallest |x|, then the smallest x.

    Returns:
        DataFrame with columns t, x_star, mean_x (positions in units of a).
    """
    if not history:
        raise ParameterRangeError("typical_path needs a non-empty history")
    a = params.units.a
    x = lattice_coordinates(params)
    rows = []
    for t, state in enumerate(history):
        probs = state.site_probabilities()
        peak = probs.max()
        candidates = x[probs >= peak * (1 - TIE_TOLERANCE)]
        best = min(candidates, key=lambda value: (abs(value), value))
        rows.append({
            "t": t,
            "x_star": float(a * best),
            "mean_x": float(a * np.dot(probs, x) / probs.sum()),
        })
    return pd.DataFrame(rows)
