"""Digital Spreading: rotation-free weighted averages on simulated quantum states."""

__version__ = "0.1.0"

from digispread.errors import CapacityError, DomainError, StructuralError
from digispread.qsim import (
    Circuit,
    Gate,
    RegisterLayout,
    Statevector,
    apply_circuit,
    apply_gate,
    apply_inverse,
    marginal_probability,
    new_statevector,
    sample_counts,
)

__all__ = [
    "__version__",
    "CapacityError",
    "DomainError",
    "StructuralError",
    "Circuit",
    "Gate",
    "RegisterLayout",
    "Statevector",
    "apply_circuit",
    "apply_gate",
    "apply_inverse",
    "marginal_probability",
    "new_statevector",
    "sample_counts",
]
