"""Exception hierarchy shared by all modules."""


class SelfDecompError(Exception):
    """Base class for every error raised by the package."""


class DomainError(SelfDecompError, ValueError):
    """An argument or parameter lies outside the supported domain."""


class StripError(DomainError):
    """A Mellin argument lies outside the strip of analyticity."""


class PoleError(DomainError):
    """Evaluation at a pole of the gamma function."""


class ConvergenceError(SelfDecompError, ArithmeticError):
    """A series did not meet its stopping rule within the term budget."""


class QuadratureError(ConvergenceError):
    """Adaptive quadrature exhausted its refinement budget."""


class TableUnavailableError(SelfDecompError, LookupError):
    """No inverse-CDF table has been built for the requested distribution."""
