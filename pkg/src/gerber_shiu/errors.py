"""Exception hierarchy shared by all modules."""


class GerberShiuError(Exception):
    """Base class for library errors."""


class ConfigurationError(GerberShiuError, ValueError):
    """Invalid or unsupported model/method configuration."""


class DomainError(GerberShiuError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class ConvergenceError(GerberShiuError, ArithmeticError):
    """A truncated or adaptive computation failed to converge."""


class StepSizeError(GerberShiuError, ArithmeticError):
    """The Neumann condition h*||B_n|| < 1 fails; use a larger N."""


class NumericalError(GerberShiuError, ArithmeticError):
    """Ill-conditioning, tolerance failure or internal inconsistency."""
