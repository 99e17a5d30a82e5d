"""Exception hierarchy.

Every error carries enough context (node index, parameter name) for the CLI
to print a message that names the violated precondition.
"""


class KFuncError(Exception):
    """Base class for all library errors."""


class GridMismatch(KFuncError, ValueError):
    pass


class DomainError(KFuncError, ValueError):
    """A field value lies outside the admissible domain at some node."""

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class RangeViolation(DomainError):
    """A scaled constraint value left the attainable range of ``f``."""


class PathDomainViolation(DomainError):
    """The deformed path left the admissible domain for some step size."""


class ZeroDenominator(KFuncError, ZeroDivisionError):
    """An integral used as a normalizer vanished."""


class ZeroNorm(ZeroDenominator):
    pass


class ZeroK(ZeroDenominator):
    pass


class ZeroQIntegral(ZeroDenominator):
    pass


class ZeroFPrime(KFuncError, ZeroDivisionError):
    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class ConstraintMismatch(KFuncError, ValueError):
    """The field is not on the constraint set within tolerance."""


class NotConverged(KFuncError, ArithmeticError):
    def __init__(self, message, probe=None):
        super().__init__(message)
        self.probe = probe


class ConfigError(KFuncError, ValueError):
    """Invalid scenario configuration (CLI exit code 2)."""
