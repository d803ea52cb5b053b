"""Pauli-string algebra on little-endian qubit registers.

Qubit j is bit j of a basis index. The local basis is ordered (|down>, |up>),
so bit value 1 means "up" (occupied) and

    X = [[0, 1], [1, 0]],  Y = [[0, i], [-i, 0]],  Z = diag(-1, 1),

which keeps the usual table XY = iZ while sigma^+ = (X + iY)/2 raises
|down> to |up>. The all-down vacuum is basis index 0.
"""

# Standard library imports
import logging
from dataclasses import dataclass
from typing import Dict, Iterable, Mapping, Tuple, Union

# Third-party imports
import numpy as np
import scipy.sparse as sp

# Local application imports
from processor.errors import LatticeError, ParameterRangeError
from utils.common import check_dense_budget

# Configure logger for this module
logger = logging.getLogger(__name__)

Letters = Tuple[Tuple[int, str], ...]

LETTERS = ("X", "Y", "Z")
COEFF_CUTOFF = 1e-15

# (left, right) -> (phase, product letter); None is the identity
_PRODUCT_TABLE: Dict[Tuple[str, str], Tuple[complex, Union[str, None]]] = {
    ("X", "X"): (1, None), ("Y", "Y"): (1, None), ("Z", "Z"): (1, None),
    ("X", "Y"): (1j, "Z"), ("Y", "X"): (-1j, "Z"),
    ("Y", "Z"): (1j, "X"), ("Z", "Y"): (-1j, "X"),
    ("Z", "X"): (1j, "Y"), ("X", "Z"): (-1j, "Y"),
}


def _normalize_letters(letters: Union[Mapping[int, str], Iterable[Tuple[int, str]]]) -> Letters:
    items = letters.items() if isinstance(letters, Mapping) else letters
    cleaned = {}
    for site, letter in items:
        if letter == "I":
            continue
        if letter not in LETTERS:
            raise ParameterRangeError(f"Unknown Pauli letter {letter!r}")
        if site < 0:
            raise LatticeError(f"Negative qubit index {site}")
        if site in cleaned:
            raise ParameterRangeError(f"Qubit {site} appears twice in a Pauli string")
        cleaned[int(site)] = letter
    return tuple(sorted(cleaned.items()))


@dataclass(frozen=True)
class PauliString:
    """A phase times a tensor product of X, Y, Z letters on distinct qubits."""

    coeff: complex
    letters: Letters = ()

    def __post_init__(self):
        object.__setattr__(self, "coeff", complex(self.coeff))
        object.__setattr__(self, "letters", _normalize_letters(self.letters))

    @property
    def support(self) -> Tuple[int, ...]:
        return tuple(site for site, _ in self.letters)

    def masks(self) -> Tuple[int, int, int]:
        """Bit masks of the X, Y and Z letters."""
        x_mask = y_mask = z_mask = 0
        for site, letter in self.letters:
            if letter == "X":
                x_mask |= 1 << site
            elif letter == "Y":
                y_mask |= 1 << site
            else:
                z_mask |= 1 << site
        return x_mask, y_mask, z_mask

    def __mul__(self, other: "PauliString") -> "PauliString":
        return pauli_mul(self, other)

    def adjoint(self) -> "PauliString":
        return PauliString(np.conj(self.coeff), self.letters)

    def action(self, n_qubits: int) -> Tuple[np.ndarray, np.ndarray]:
        """Targets and phases: the string maps basis index b to phases[b] |targets[b]>."""
        if self.letters and self.letters[-1][0] >= n_qubits:
            raise LatticeError(f"Pauli string acts on qubit {self.letters[-1][0]} outside {n_qubits} qubits")
        x_mask, y_mask, z_mask = self.masks()
        basis = np.arange(1 << n_qubits, dtype=np.int64)
        y_up = np.bitwise_count(basis & y_mask).astype(np.int64)
        y_down = bin(y_mask).count("1") - y_up
        z_down = np.bitwise_count(~basis & z_mask).astype(np.int64)
        # Y|up> = i|down>, Y|down> = -i|up>, Z|down> = -|down>
        phases = self.coeff * (1j ** y_up) * ((-1j) ** y_down) * ((-1.0) ** z_down)
        return basis ^ (x_mask | y_mask), phases

    def to_sparse(self, n_qubits: int) -> sp.csr_matrix:
        check_dense_budget(n_qubits, "Pauli operator")
        targets, phases = self.action(n_qubits)
        basis = np.arange(1 << n_qubits)
        dim = 1 << n_qubits
        return sp.csr_matrix((phases, (targets, basis)), shape=(dim, dim))


def pauli_mul(a: PauliString, b: PauliString) -> PauliString:
    """Product a * b using the single-site table, phases accumulated in the coefficient."""
    merged = dict(a.letters)
    coeff = a.coeff * b.coeff
    for site, letter in b.letters:
        if site not in merged:
            merged[site] = letter
            continue
        phase, product = _PRODUCT_TABLE[(merged[site], letter)]
        coeff *= phase
        if product is None:
            del merged[site]
        else:
            merged[site] = product
    return PauliString(coeff, tuple(merged.items()))


class PauliSum:
    """Linear combination of Pauli strings, stored as letters -> coefficient."""

    def __init__(self, terms: Union[Mapping[Letters, complex], Iterable[PauliString], None] = None):
        self.terms: Dict[Letters, complex] = {}
        if terms is None:
            return
        if isinstance(terms, Mapping):
            for letters, coeff in terms.items():
                self._accumulate(_normalize_letters(letters), complex(coeff))
        else:
            for string in terms:
                self._accumulate(string.letters, string.coeff)

    def _accumulate(self, letters: Letters, coeff: complex) -> None:
        self.terms[letters] = self.terms.get(letters, 0j) + coeff

    @classmethod
    def identity(cls, coeff: complex = 1.0) -> "PauliSum":
        return cls({(): coeff})

    @classmethod
    def single(cls, letter: str, site: int, coeff: complex = 1.0) -> "PauliSum":
        return cls([PauliString(coeff, ((site, letter),))])

    def strings(self) -> Tuple[PauliString, ...]:
        return tuple(PauliString(coeff, letters) for letters, coeff in self.terms.items())

    def simplify(self, cutoff: float = COEFF_CUTOFF) -> "PauliSum":
        return PauliSum({letters: coeff for letters, coeff in self.terms.items() if abs(coeff) > cutoff})

    def max_coeff(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def is_zero(self, tol: float = 1e-12) -> bool:
        return self.max_coeff() <= tol

    def adjoint(self) -> "PauliSum":
        return PauliSum({letters: np.conj(coeff) for letters, coeff in self.terms.items()})

    def max_site(self) -> int:
        return max((letters[-1][0] for letters in self.terms if letters), default=-1)

    def __add__(self, other: "PauliSum") -> "PauliSum":
        result = PauliSum(self.terms)
        for letters, coeff in other.terms.items():
            result._accumulate(letters, coeff)
        return result

    def __neg__(self) -> "PauliSum":
        return self * -1.0

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + (-other)

    def __mul__(self, other: Union["PauliSum", complex, float, int]) -> "PauliSum":
        if isinstance(other, PauliSum):
            result = PauliSum()
            for left_letters, left_coeff in self.terms.items():
                for right_letters, right_coeff in other.terms.items():
                    product = pauli_mul(PauliString(left_coeff, left_letters), PauliString(right_coeff, right_letters))
                    result._accumulate(product.letters, product.coeff)
            return result.simplify()
        return PauliSum({letters: coeff * other for letters, coeff in self.terms.items()})

    __rmul__ = __mul__

    def commutator(self, other: "PauliSum") -> "PauliSum":
        return (self * other - other * self).simplify()

    def anticommutator(self, other: "PauliSum") -> "PauliSum":
        return (self * other + other * self).simplify()

    def to_sparse(self, n_qubits: int) -> sp.csr_matrix:
        check_dense_budget(n_qubits, "Pauli operator")
        dim = 1 << n_qubits
        matrix = sp.csr_matrix((dim, dim), dtype=complex)
        for string in self.strings():
            matrix = matrix + string.to_sparse(n_qubits)
        return matrix

    def to_dense(self, n_qubits: int) -> np.ndarray:
        return self.to_sparse(n_qubits).toarray()

    def apply(self, vector: np.ndarray) -> np.ndarray:
        """Apply to a dense state vector without building a matrix."""
        vector = np.asarray(vector, dtype=complex)
        n_qubits = int(vector.size).bit_length() - 1
        if vector.ndim != 1 or 1 << n_qubits != vector.size:
            raise LatticeError(f"State vector length {vector.size} is not a power of two")
        out = np.zeros_like(vector)
        for string in self.strings():
            targets, phases = string.action(n_qubits)
            out[targets] += phases * vector
        return out

    def __repr__(self) -> str:
        parts = [f"{coeff:.6g}*{''.join(f'{l}{s}' for s, l in letters) or 'I'}"
                 for letters, coeff in self.terms.items()]
        return f"PauliSum({' + '.join(parts) or '0'})"


def sigma_plus(site: int) -> PauliSum:
    """Raising operator (X + iY)/2: |down> -> |up>."""
    return PauliSum([PauliString(0.5, ((site, "X"),)), PauliString(0.5j, ((site, "Y"),))])


def sigma_minus(site: int) -> PauliSum:
    """Lowering operator (X - iY)/2: |up> -> |down>."""
    return PauliSum([PauliString(0.5, ((site, "X"),)), PauliString(-0.5j, ((site, "Y"),))])


def z_string(sites: Iterable[int], coeff: complex = 1.0) -> PauliSum:
    """Product of Z letters on the given qubits."""
    return PauliSum([PauliString(coeff, tuple((site, "Z") for site in sites))])


@dataclass(frozen=True, eq=False)
class QubitState:
    """Dense state over ``n_qubits`` qubits (little-endian basis indices)."""

    vector: np.ndarray
    n_qubits: int

    def __post_init__(self):
        check_dense_budget(self.n_qubits, "qubit state")
        vector = np.array(self.vector, dtype=complex)
        if vector.shape != (1 << self.n_qubits,):
            raise LatticeError(f"Qubit vector must have length {1 << self.n_qubits}, got {vector.shape}")
        vector.flags.writeable = False
        object.__setattr__(self, "vector", vector)

    @classmethod
    def vacuum(cls, n_qubits: int) -> "QubitState":
        return cls.basis(n_qubits, 0)

    @classmethod
    def basis(cls, n_qubits: int, index: int) -> "QubitState":
        check_dense_budget(n_qubits, "qubit state")
        vector = np.zeros(1 << n_qubits, dtype=complex)
        vector[index] = 1.0
        return cls(vector, n_qubits)

    def norm(self) -> float:
        return float(np.linalg.norm(self.vector))
