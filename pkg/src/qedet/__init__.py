"""qedet: stabilizer-code quantum error detection toolkit.

Codes and encoders, noisy Clifford sampling, post-selected / projector-based
mitigated expectation values, pseudothreshold estimation, and codeword
enumeration benchmarks.
"""

from .errors import (
    BudgetExceededError,
    CapacityError,
    DimensionError,
    InvalidParameterError,
    NoCodewordsError,
    NoCrossoverError,
    PhaseError,
    QedetError,
    RoutingError,
    SynthesisError,
    UnsupportedOperationError,
    VanishingCodespaceError,
)
from .circuits import CliffordCircuit, Gate
from .pauli import (
    CheckMatrix,
    PauliString,
    Tableau,
    conjugate_by_circuit,
    pauli_commutes,
    pauli_multiply,
    pauli_multiply_phase,
    rref_gf2,
)

__all__ = [
    "BudgetExceededError",
    "CapacityError",
    "CheckMatrix",
    "CliffordCircuit",
    "DimensionError",
    "Gate",
    "InvalidParameterError",
    "NoCodewordsError",
    "NoCrossoverError",
    "PauliString",
    "PhaseError",
    "QedetError",
    "RoutingError",
    "SynthesisError",
    "Tableau",
    "UnsupportedOperationError",
    "VanishingCodespaceError",
    "conjugate_by_circuit",
    "pauli_commutes",
    "pauli_multiply",
    "pauli_multiply_phase",
    "rref_gf2",
]

__version__ = "0.1.0"
