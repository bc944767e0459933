"""Exception types raised by the simulator."""


class CmzoError(Exception):
    """Base class for all package errors."""


class ConfigError(CmzoError):
    """Malformed or inconsistent run configuration."""


class ConnectivityFailure(CmzoError):
    """A topology is disconnected, or random resampling never produced a
    connected graph within the retry budget."""


class SpectrumViolation(CmzoError):
    """A mixing matrix has a non-leading eigenvalue with modulus >= 1."""


class QueryFailure(CmzoError):
    """The objective raised while evaluating a single function query."""


class NumericalDivergence(CmzoError):
    """An iterate exceeded the magnitude cap or became non-finite."""

    def __init__(self, t: int, message: str = ""):
        self.t = t
        super().__init__(message or f"iterate diverged at t={t}")


class DomainError(CmzoError):
    """A closed-form constant is undefined for the supplied parameters
    (for example a square root of a negative discriminant)."""

    def __init__(self, expression: str, message: str = ""):
        self.expression = expression
        super().__init__(message or f"constant undefined: {expression}")
