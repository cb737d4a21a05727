"""Exception hierarchy shared by all modules."""


class FracBuckleError(Exception):
    """Base class for every error raised by :mod:`fracbuckle`."""


class DomainError(FracBuckleError, ValueError):
    """A coordinate lies outside the domain it was evaluated on."""


class ParameterError(FracBuckleError, ValueError):
    """An argument is outside its admissible range."""


class SingularityError(FracBuckleError, ValueError):
    """The attenuation kernel was sampled at its singular point."""


class ConfigError(FracBuckleError, ValueError):
    """Invalid model or study configuration."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class AssemblyError(FracBuckleError):
    """Assembled stiffness is not symmetric positive definite."""


class NoBucklingError(FracBuckleError):
    """The geometric stiffness cannot destabilise the structure."""


class NumericalError(FracBuckleError):
    """An eigen solve did not meet its residual tolerance."""
