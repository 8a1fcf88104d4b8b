"""Exact-diagonalization audit of charging-power bounds for k-local spin batteries."""

from .pauli import (
    DENSE_THRESHOLD,
    CapabilityError,
    ConstructionError,
    HamiltonianSpec,
    LocalTerm,
    OperatorMatrix,
    PauliWord,
    commutator,
    operator_norm,
    realize,
)

__version__ = "0.1.0"
