# Standard library imports
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

# Third-party imports
import numpy as np
import pandas as pd

# Local application imports
from processor.automaton.core import AutomatonParams, Boundary, SpinorState
from processor.automaton.dirac import (
    BandOperator,
    Direction,
    build_band_unitary,
    evolve,
    momentum_unitary,
)
from processor.errors import BoundaryError, LatticeError, NonHermitianError, ParameterRangeError

# Configure logger for this module
logger = logging.getLogger(__name__)

BRANCH_POINT_GAP = 1e-12
EXPONENTIAL_MAP_TOLERANCE = 1e-12
HERMITICITY_TOLERANCE = 1e-10


class CheckStatus(str, Enum):
    PASS = "PASS"
    EXPECTED_FAIL = "EXPECTED-FAIL"
    FAIL = "FAIL"


@dataclass(frozen=True, eq=False)
class EmergentH:
    """Band blocks of H = (i hbar / 2 tau)(U - U^dag).

    ``band`` holds (h_minus, h_zero, h_plus) with the same site arithmetic as
    the unitary it came from.
    """

    band: BandOperator
    params: AutomatonParams

    @property
    def h_minus(self) -> np.ndarray:
        return self.band.a_minus

    @property
    def h_zero(self) -> np.ndarray:
        return self.band.a_zero

    @property
    def h_plus(self) -> np.ndarray:
        return self.band.a_plus

    def apply(self, amplitudes: np.ndarray) -> np.ndarray:
        return self.band.apply(amplitudes)

    def symbol(self, phi: float) -> np.ndarray:
        return self.band.symbol(phi)

    def to_dense(self) -> np.ndarray:
        return self.band.to_dense()


@dataclass(frozen=True, eq=False)
class InterpolatingH:
    """Dense generator with exp(-i H tau / hbar) = U, built mode by mode."""

    dense: np.ndarray
    couplings: pd.DataFrame
    params: AutomatonParams


@dataclass(frozen=True)
class ExponentialMapReport:
    phi: float
    s_cos_phi: float
    residual: float
    tolerance: float
    status: CheckStatus


@dataclass(frozen=True, eq=False)
class LocalityProfile:
    profile: pd.DataFrame
    max_offset: int


def emergent_h(params: AutomatonParams, u: Optional[BandOperator] = None) -> EmergentH:
    """Emergent Hamiltonian of the automaton (or of a supplied band unitary)."""
    u = u or build_band_unitary(params)
    units = params.units
    factor = 1j * units.hbar / (2 * units.tau)
    band = BandOperator(
        a_minus=factor * (u.a_minus - u.a_plus.conj().T),
        a_zero=factor * (u.a_zero - u.a_zero.conj().T),
        a_plus=factor * (u.a_plus - u.a_minus.conj().T),
        n_sites=u.n_sites,
        boundary=u.boundary,
    )
    return EmergentH(band=band, params=params)


def three_point_step(state_t: SpinorState, state_other: SpinorState, h: EmergentH,
                     direction: Union[Direction, str] = Direction.FORWARD) -> SpinorState:
    """Reversible three-point update.

    Forward: psi(t + tau) = psi(t - tau) - (2 i tau / hbar) H psi(t), with
    ``state_other`` = psi(t - tau). Backward: psi(t - tau) = psi(t + tau)
    + (2 i tau / hbar) H psi(t), with ``state_other`` = psi(t + tau).
    """
    if state_t.n_sites != h.band.n_sites or state_other.n_sites != h.band.n_sites:
        raise LatticeError("Three-point update states do not match the Hamiltonian size")
    units = h.params.units
    kick = (2j * units.tau / units.hbar) * h.apply(state_t.amplitudes)
    if Direction(direction) is Direction.FORWARD:
        return SpinorState(state_other.amplitudes - kick)
    return SpinorState(state_other.amplitudes + kick)


def trajectory_residual(params: AutomatonParams, state: SpinorState, steps: int) -> float:
    """Max over the trajectory of |(i hbar / 2 tau)(psi(t+tau) - psi(t-tau)) - H psi(t)|."""
    if steps < 2:
        raise ParameterRangeError(f"A trajectory residual needs at least 2 steps, got {steps}")
    u = build_band_unitary(params)
    h = emergent_h(params, u)
    units = params.units
    history = evolve(u, state, steps)
    worst = 0.0
    for t in range(1, steps):
        lhs = (1j * units.hbar / (2 * units.tau)) * (history[t + 1].amplitudes - history[t - 1].amplitudes)
        worst = max(worst, float(np.max(np.abs(lhs - h.apply(history[t].amplitudes)))))
    return worst


def discrete_exponential_check(params: AutomatonParams, phi: float) -> ExponentialMapReport:
    """Compare exp(-i arcsin(H(phi) tau / hbar)) with u(phi) on the principal branch.

    Modes with s cos(phi) < 0 have eigenphase E > pi/2 which the principal
    arcsin cannot reach; a mismatch there is reported as EXPECTED-FAIL.
    """
    units = params.units
    mode = momentum_unitary(params, phi)
    scaled = emergent_h(params.with_sites(1)).symbol(mode.phi) * units.tau / units.hbar
    values, vectors = np.linalg.eigh(scaled)
    s_cos_phi = params.s * math.cos(mode.phi)
    # principal arcsin(w) = atan2(w, sqrt(1 - w^2)) and sqrt(1 - xi^2) = |s cos phi|
    branch = np.arctan2(values, abs(s_cos_phi))
    estimate = vectors @ np.diag(np.exp(-1j * branch)) @ vectors.conj().T
    residual = float(np.max(np.abs(estimate - mode.u_phi)))
    if residual <= EXPONENTIAL_MAP_TOLERANCE:
        status = CheckStatus.PASS
    elif s_cos_phi < 0:
        status = CheckStatus.EXPECTED_FAIL
        logger.info(f"Principal arcsin branch misses mode phi={mode.phi:.6f} (residual {residual:.3e})")
    else:
        status = CheckStatus.FAIL
        logger.error(f"Exponential map mismatch at phi={mode.phi:.6f}: residual {residual:.3e}")
    return ExponentialMapReport(mode.phi, s_cos_phi, residual, EXPONENTIAL_MAP_TOLERANCE, status)


def _mode_generator(params: AutomatonParams, phi: float) -> np.ndarray:
    units = params.units
    mode = momentum_unitary(params, phi)
    energy = mode.energy
    if energy > math.pi - BRANCH_POINT_GAP:
        logger.warning(f"Eigenphase at the log branch point for phi={mode.phi:.6f}; perturbing by {BRANCH_POINT_GAP}")
        energy = math.pi - BRANCH_POINT_GAP
    basis = mode.eigenvectors
    return (units.hbar / units.tau) * basis @ np.diag([energy, -energy]) @ basis.conj().T


def interpolating_h(params: AutomatonParams, threads: Optional[int] = None) -> InterpolatingH:
    """Generator H with U = exp(-i H tau / hbar), from the principal log of each u(phi_k).

    Args:
        params: Automaton on a periodic lattice.
        threads: Worker cap for the per-mode construction; results do not depend on it.
    """
    if params.boundary is not Boundary.PERIODIC:
        raise BoundaryError("The interpolating Hamiltonian is built in momentum space and needs a periodic lattice")
    n = params.n_sites
    phases = [2 * math.pi * k / n for k in range(n)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        symbols = np.array(list(pool.map(lambda phi: _mode_generator(params, phi), phases)))
    # block C_r couples site m to site m - r; the inverse transform over k yields it
    blocks = np.fft.ifft(symbols, axis=0)
    offsets = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    dense = blocks[offsets].transpose(0, 2, 1, 3).reshape(2 * n, 2 * n)
    profile = locality_profile(dense, threshold=0.0).profile
    return InterpolatingH(dense=dense, couplings=profile, params=params)


def locality_profile(h: np.ndarray, threshold: float) -> LocalityProfile:
    """Largest block coupling at each circular site offset.

    Args:
        h: Square Hermitian matrix over 2N modes.
        threshold: Couplings at or above this magnitude count as significant.

    Returns:
        LocalityProfile with a DataFrame (offset, max_coupling) and the
        largest offset whose coupling reaches the threshold (0 if none does).

    Raises:
        NonHermitianError: If h is not Hermitian to 1e-10.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape[0] % 2:
        raise LatticeError(f"Expected a square matrix over 2N modes, got shape {h.shape}")
    if np.max(np.abs(h - h.conj().T), initial=0.0) > HERMITICITY_TOLERANCE:
        raise NonHermitianError("locality_profile needs a Hermitian matrix")
    n = h.shape[0] // 2
    magnitudes = np.abs(h).reshape(n, 2, n, 2).max(axis=(1, 3))
    gap = np.abs(np.arange(n)[:, None] - np.arange(n)[None, :])
    distance = np.minimum(gap, n - gap)
    offsets = np.arange(n // 2 + 1)
    strongest = np.array([magnitudes[distance == r].max() for r in offsets])
    significant = offsets[strongest >= threshold] if threshold > 0 else offsets[strongest > 0]
    max_offset = int(significant.max()) if significant.size else 0
    return LocalityProfile(pd.DataFrame({"offset": offsets, "max_coupling": strongest}), max_offset)
