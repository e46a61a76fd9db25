"""Exception hierarchy shared by the library and the command line."""


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class DegenerateConfigurationError(DomainError):
    """Points or coordinates sit on a degenerate locus (vanishing bracket,
    C-circle triple, vanishing denominator)."""


class MoveRefusedError(DegenerateConfigurationError):
    """A Pachner move cannot be carried out on the given data."""


class StructuralError(ValueError):
    """A triangulation is combinatorially malformed for the requested check."""
