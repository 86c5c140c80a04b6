"""Exception types shared across the toolkit.

Each class marks a distinct failure mode so callers (and the CLI exit-code
mapping) can tell user errors apart from capacity guards and runtime
conditions.
"""


class QedetError(Exception):
    """Base class for all toolkit errors."""


class DimensionError(QedetError, ValueError):
    """Operands have incompatible qubit counts / lengths."""


class PhaseError(QedetError, ValueError):
    """A Pauli product left the +/-1 sign domain (anti-Hermitian result)."""


class InvalidParameterError(QedetError, ValueError):
    """A constructor argument violates its precondition."""


class UnsupportedOperationError(QedetError, ValueError):
    """Requested operation is outside the supported gate/noise/observable set."""


class CapacityError(QedetError, RuntimeError):
    """An exponential-size computation exceeds its configured cap."""


class BudgetExceededError(QedetError, RuntimeError):
    """A brute-force search ran past its operation budget."""


class SynthesisError(QedetError, RuntimeError):
    """Encoder extraction failed an internal consistency check."""


class RoutingError(QedetError, RuntimeError):
    """The routing region cannot host the circuit (disconnected / too small)."""


class NoCodewordsError(QedetError, RuntimeError):
    """Post-selection kept zero shots; carries the (zero) codeword fraction."""

    def __init__(self, message: str, total: int = 0):
        super().__init__(message)
        self.f_c = 0.0
        self.kept = 0
        self.total = total


class VanishingCodespaceError(QedetError, RuntimeError):
    """Projector denominator fell under the numerical floor."""


class NoCrossoverError(QedetError, RuntimeError):
    """No sign change of (encoded error - physical error) inside the grid."""
