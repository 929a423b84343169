"""Exception hierarchy shared by every module of the package."""


class AoifError(Exception):
    """Base class for all package errors."""


class ConfigError(AoifError, ValueError):
    """Invalid user input; ``path`` names the offending field."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class DomainError(AoifError, ValueError):
    """Argument outside the domain of a mathematical operation."""


class NumericalError(AoifError, ArithmeticError):
    """A numerical kernel failed; ``residual`` carries the diagnostic value if any."""

    def __init__(self, message, residual=None):
        self.residual = residual
        super().__init__(message if residual is None else f"{message} (residual={residual:.3e})")


class SingularMatrixError(NumericalError):
    def __init__(self, message, pivot):
        self.pivot = pivot
        super().__init__(f"{message} (smallest pivot={pivot:.3e})")
        self.residual = None


class ClassificationError(NumericalError):
    """An eigenvalue block could not be assigned to one side of the stability split."""


class NonErgodicError(NumericalError):
    """The fluid queue has no proper steady state."""


class UnsupportedReductionError(AoifError):
    """The reduced two-source construction does not apply to this system."""


class StarvationError(AoifError):
    """A simulated source never delivers a packet successfully."""

    def __init__(self, source, message):
        self.source = source
        super().__init__(f"source {source}: {message}")
