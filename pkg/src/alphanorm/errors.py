"""Exception types shared across the package."""


class AlphaNormError(Exception):
    """Base class for all errors raised by this package."""


class ShapeError(AlphaNormError, ValueError):
    """Operand has the wrong shape (non-square, mismatched partition, ...)."""


class ParameterError(AlphaNormError, ValueError):
    """Scalar parameter outside its admissible range (alpha, p, s, tol, ...)."""


class PositivityError(AlphaNormError, ValueError):
    """A matrix required to be positive semidefinite is not, beyond tolerance."""


class MatrixFormatError(AlphaNormError, ValueError):
    """Serialized matrix or block-matrix payload violates the JSON schema."""


class ConvergenceError(AlphaNormError, RuntimeError):
    """An iterative enclosure failed to reach the requested width."""
