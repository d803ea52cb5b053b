"""Exception hierarchy shared by the automaton, qubit and oracle packages.

Every library error derives from ``AutomatonError`` which itself is a
``ValueError``, so callers that only care about "bad input" can catch the
builtin type.
"""


class AutomatonError(ValueError):
    """Base class for all errors raised by the simulator."""


class ParameterRangeError(AutomatonError):
    """A scalar parameter lies outside its admissible range."""


class LatticeError(AutomatonError):
    """Site, mode or size does not fit the lattice (includes size mismatches)."""


class BoundaryError(AutomatonError):
    """The operation needs a periodic lattice, or exact unitarity was requested on an open one."""


class CommensurabilityError(AutomatonError):
    """A momentum does not fit the finite periodic lattice."""


class ParallelStateError(AutomatonError):
    """Antisymmetrisation of two parallel single-particle states vanishes."""


class NonHermitianError(AutomatonError):
    """A matrix expected to be Hermitian is not."""


class NonUnitaryError(AutomatonError):
    """A matrix expected to be unitary is not."""


class MemoryGuardError(AutomatonError):
    """A dense vector over too many qubits or modes was requested."""


class LinkOrientationError(AutomatonError):
    """A link set contains distinct parallel vectors."""


class NonCommutingLinksError(AutomatonError):
    """Two P observables of a link set anticommute on the given lattice."""

    def __init__(self, message: str, pair=None):
        super().__init__(message)
        self.pair = pair


class ConfigError(AutomatonError):
    """Experiment configuration could not be validated."""
