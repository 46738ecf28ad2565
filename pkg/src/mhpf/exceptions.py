"""Exception types raised by the library."""


class MHPFError(Exception):
    """Base class for all library errors."""


class DimensionError(MHPFError, ValueError):
    """Vector or tensor shapes do not agree."""


class InvalidProblemError(MHPFError, ValueError):
    """A problem specification violates its preconditions."""


class DegenerateIterateError(MHPFError):
    """A block of an iterate vanished, so it cannot be normalized.

    Attributes
    ----------
    block : int
        Zero-based index of the offending block.
    """

    def __init__(self, block, message=None):
        self.block = block
        super().__init__(message or f"block {block} is identically zero")


class DegenerateMapError(MHPFError):
    """The map sends the all-ones vector to a vector with a zero coordinate."""


class ExpansiveRegimeError(MHPFError):
    """The homogeneity matrix has spectral radius above one."""

    def __init__(self, rho):
        self.rho = rho
        super().__init__(
            f"spectral radius of the homogeneity matrix is {rho:.17g} > 1; "
            "no convergence or optimality guarantee applies"
        )


class NoWeightVectorError(MHPFError):
    """No admissible positive weight vector exists for the homogeneity matrix."""


class BudgetExceededError(MHPFError):
    """An enumeration or grid would exceed its configured size cap."""


class ResidualError(MHPFError, ValueError):
    """A supplied eigenpair does not satisfy the eigen-equation closely enough."""
