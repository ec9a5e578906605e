"""Exception hierarchy shared by the library and the CLI."""


class PsboundError(Exception):
    """Base class for all library errors."""


class SpecError(PsboundError, ValueError):
    """Invalid input specification (bad function spec, empty catalog, ...)."""


class DimensionError(SpecError):
    """Operands with incompatible shapes."""


class DomainError(PsboundError, ValueError):
    """A value fell outside the domain of a scalar or matrix function."""

    def __init__(self, message, value=None):
        super().__init__(message)
        self.value = value


class SingularityError(DomainError):
    """A function needed to be nonzero but vanished."""


class RangeError(DomainError):
    """A numerical inverse was evaluated outside its tabulated range."""


class NotInvertibleError(PsboundError, ValueError):
    """A function could not be shown to be strictly increasing."""


class ConditioningError(PsboundError, ArithmeticError):
    """Matrix too ill-conditioned to invert safely."""

    def __init__(self, message, condition_number=None):
        super().__init__(message)
        self.condition_number = condition_number


class ConvergenceError(PsboundError, ArithmeticError):
    """An iterative solver ran out of its iteration budget."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class GenerationError(PsboundError, RuntimeError):
    """A random model could not produce a valid sample within its budget."""
