# Standard library imports
import logging
import math
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import Tuple, Union

# Third-party imports
import numpy as np

# Local application imports
from processor.errors import LatticeError, ParameterRangeError

# Configure logger for this module
logger = logging.getLogger(__name__)

# Absolute slack allowed on theta and m_ratio before rejecting them
RANGE_SLACK = 1e-12
NORM_TOLERANCE = 1e-12


class Boundary(str, Enum):
    """Lattice boundary rule."""

    PERIODIC = "periodic"
    OPEN = "open"


class Component(IntEnum):
    """Spinor component; the integer value is the column in amplitude arrays."""

    PLUS = 0
    MINUS = 1

    @classmethod
    def parse(cls, value: Union["Component", str, int]) -> "Component":
        if isinstance(value, Component):
            return value
        # plain integers are signs here, not column indices
        if value in ("+", "plus", 1, "+1"):
            return cls.PLUS
        if value in ("-", "minus", -1, "-1"):
            return cls.MINUS
        raise ParameterRangeError(f"Unknown spinor component: {value!r}")

    @property
    def sign(self) -> int:
        return 1 if self is Component.PLUS else -1


@dataclass(frozen=True)
class UnitSystem:
    """Physical constants of the lattice: spacing a, step tau and hbar.

    The causal speed and the Planck mass are derived on access and never
    stored, so they cannot drift from the three primitive constants.
    """

    a: float = 1.0
    tau: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        for name in ("a", "tau", "hbar"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ParameterRangeError(f"Unit constant {name} must be finite and positive, got {value}")

    @property
    def c_causal(self) -> float:
        return self.a / self.tau

    @property
    def m_planck(self) -> float:
        return self.hbar / (self.a * self.c_causal)


@dataclass(frozen=True)
class AutomatonParams:
    """Mass angle, lattice size, boundary and units of a Dirac automaton.

    Args:
        theta: Mass angle in [0, pi/2]; cos(theta) = m / m_planck.
        n_sites: Number of field sites N.
        boundary: Periodic (default) or Open.
        units: Physical constants, natural units by default.
    """

    theta: float
    n_sites: int
    boundary: Boundary = Boundary.PERIODIC
    units: UnitSystem = field(default_factory=UnitSystem)

    def __post_init__(self):
        theta = float(self.theta)
        if not math.isfinite(theta) or theta < -RANGE_SLACK or theta > math.pi / 2 + RANGE_SLACK:
            raise ParameterRangeError(f"theta must lie in [0, pi/2], got {theta}")
        object.__setattr__(self, "theta", min(max(theta, 0.0), math.pi / 2))
        if isinstance(self.n_sites, bool) or int(self.n_sites) != self.n_sites or self.n_sites < 1:
            raise LatticeError(f"n_sites must be a positive integer, got {self.n_sites}")
        object.__setattr__(self, "n_sites", int(self.n_sites))
        object.__setattr__(self, "boundary", Boundary(self.boundary))

    @classmethod
    def from_mass_ratio(cls, m_ratio: float, n_sites: int, boundary: Boundary = Boundary.PERIODIC,
                        units: UnitSystem = UnitSystem()) -> "AutomatonParams":
        theta, _, _ = coupling_from_mass(m_ratio)
        return cls(theta=theta, n_sites=n_sites, boundary=boundary, units=units)

    def with_sites(self, n_sites: int) -> "AutomatonParams":
        return AutomatonParams(self.theta, n_sites, self.boundary, self.units)

    @property
    def c(self) -> float:
        # cos(pi/2) is 6e-17 in floating point; the massless case must be exact
        if abs(self.theta - math.pi / 2) <= 1e-15:
            return 0.0
        return math.cos(self.theta)

    @property
    def s(self) -> float:
        return math.sin(self.theta)

    @property
    def zeta(self) -> float:
        """Inverse vacuum refraction index, equal to s."""
        return self.s

    @property
    def m_ratio(self) -> float:
        return self.c

    @property
    def mass(self) -> float:
        return self.c * self.units.m_planck

    @property
    def compton_wavelength(self) -> float:
        return self.units.a / self.c if self.c > 0 else math.inf

    @property
    def omega(self) -> float:
        return self.units.c_causal * self.c / self.units.a

    @property
    def n_modes(self) -> int:
        return 2 * self.n_sites


@dataclass(frozen=True, eq=False)
class SpinorState:
    """Single-particle amplitudes Psi[n, alpha] over N field sites.

    Column 0 holds the + component, column 1 the - component.
    """

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.ndim != 2 or amps.shape[1] != 2 or amps.shape[0] < 1:
            raise LatticeError(f"Spinor amplitudes must have shape (N, 2), got {amps.shape}")
        if not np.all(np.isfinite(amps)):
            raise ParameterRangeError("Spinor amplitudes must be finite")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def localized(cls, n_sites: int, site: int, alpha: Union[Component, str] = Component.PLUS) -> "SpinorState":
        amps = np.zeros((n_sites, 2), dtype=complex)
        amps[_check_site(site, n_sites), Component.parse(alpha)] = 1.0
        return cls(amps)

    @classmethod
    def from_modes(cls, vector: np.ndarray) -> "SpinorState":
        """Build from a flat 2N vector in mode order (j = 2n + alpha)."""
        vector = np.asarray(vector, dtype=complex)
        if vector.ndim != 1 or vector.size % 2:
            raise LatticeError(f"Mode vector must be one-dimensional of even length, got {vector.shape}")
        return cls(vector.reshape(-1, 2))

    @property
    def n_sites(self) -> int:
        return self.amplitudes.shape[0]

    def to_modes(self) -> np.ndarray:
        return self.amplitudes.reshape(-1).copy()

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2)))

    def normalized(self) -> "SpinorState":
        norm = self.norm()
        if norm == 0:
            raise ParameterRangeError("Cannot normalize the zero spinor")
        return SpinorState(self.amplitudes / norm)

    def is_normalized(self, tol: float = NORM_TOLERANCE) -> bool:
        return abs(self.norm() ** 2 - 1.0) <= tol

    def site_probabilities(self) -> np.ndarray:
        return np.sum(np.abs(self.amplitudes) ** 2, axis=1)

    def component_probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True, eq=False)
class TwoParticleState:
    """Antisymmetric two-fermion amplitudes Psi[i, j] over M = 2N modes.

    Normalisation is sum over all (i, j) of |Psi_ij|^2 = 1, which equals
    2 * sum_{i<j} |Psi_ij|^2.
    """

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.ndim != 2 or amps.shape[0] != amps.shape[1] or amps.shape[0] % 2:
            raise LatticeError(f"Two-particle amplitudes must be square of even size, got {amps.shape}")
        if not np.all(np.isfinite(amps)):
            raise ParameterRangeError("Two-particle amplitudes must be finite")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_modes(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def n_sites(self) -> int:
        return self.n_modes // 2

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2)))

    def antisymmetry_residual(self) -> float:
        return float(np.max(np.abs(self.amplitudes + self.amplitudes.T)))

    def site_probabilities(self) -> np.ndarray:
        """P[n, m] = sum over components of |Psi_{2n+a, 2m+b}|^2."""
        n = self.n_sites
        probs = np.abs(self.amplitudes.reshape(n, 2, n, 2)) ** 2
        return probs.sum(axis=(1, 3))


def coupling_from_mass(m_ratio: float) -> Tuple[float, float, float]:
    """Convert a mass m / m_planck into the coupling (theta, c, s).

    Args:
        m_ratio: Mass in Planck units, in [0, 1].

    Returns:
        Tuple (theta, c, s) with c = m_ratio and s = sqrt(1 - m_ratio^2).

    Raises:
        ParameterRangeError: If m_ratio is outside [0, 1].
    """
    m_ratio = float(m_ratio)
    if not math.isfinite(m_ratio) or m_ratio < -RANGE_SLACK or m_ratio > 1 + RANGE_SLACK:
        raise ParameterRangeError(f"m_ratio must lie in [0, 1], got {m_ratio}")
    c = min(max(m_ratio, 0.0), 1.0)
    s = math.sqrt(1.0 - c * c)
    return math.acos(c), c, s


def _check_site(n: int, n_sites: int) -> int:
    if not 0 <= n < n_sites:
        raise LatticeError(f"Site {n} outside lattice of {n_sites} sites")
    return int(n)


def mode_index(n: int, alpha: Union[Component, str], n_sites: int) -> int:
    """Flat mode of site n and component alpha: 2n for +, 2n + 1 for -."""
    return 2 * _check_site(n, n_sites) + int(Component.parse(alpha))


def mode_from_index(j: int, n_sites: int) -> Tuple[int, Component]:
    """Inverse of ``mode_index``."""
    if not 0 <= j < 2 * n_sites:
        raise LatticeError(f"Mode {j} outside range of {2 * n_sites} modes")
    return j // 2, Component(j % 2)


def signed_site(n: int, n_sites: int) -> int:
    """Signed coordinate of a periodic site: N - 1 maps to -1."""
    return ((n + n_sites // 2) % n_sites) - n_sites // 2


def site_coordinates(n_sites: int) -> np.ndarray:
    """Signed coordinates of all sites, in site order."""
    return (np.arange(n_sites) + n_sites // 2) % n_sites - n_sites // 2
