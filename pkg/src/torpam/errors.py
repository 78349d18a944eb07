"""Exception types shared across the package."""


class DomainError(ValueError):
    """Arguments outside the mathematical domain of an operation."""


class SingularityError(DomainError):
    """Evaluation requested exactly at a non-removable singularity."""


class DalangViolation(DomainError):
    """Parameters violate the integrability condition 2*(alpha + 1) > d."""


class AliasingError(DomainError):
    """Grid too coarse to represent the requested spectral content."""


class NumericsError(RuntimeError):
    """A numerical procedure failed to converge; details in the message."""
