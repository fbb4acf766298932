class StructuralError(ValueError):
    """A circuit, gate, layout or register is malformed for the requested use."""


class CapacityError(ValueError):
    """The request exceeds the desk-scale qubit budget."""


class DomainError(ValueError):
    """A numeric argument lies outside the domain of the function."""
