"""Exception hierarchy shared across the package."""


class PrimlatError(Exception):
    """Base class for all errors raised by this package."""


class CapacityError(PrimlatError):
    """A size or cutoff exceeds what the build can hold (sieve cap, accumulator width)."""


class RangeError(PrimlatError, ValueError):
    """An argument lies outside the table range it must be looked up in."""


class DomainError(PrimlatError, ValueError):
    """An argument violates a mathematical precondition (non-prime, zero, ...)."""


class FormPositivityError(DomainError):
    """A polynomial form evaluated below 1 on the probed grid."""

    def __init__(self, point, value):
        self.point = tuple(point)
        self.value = value
        super().__init__(f"form value {value} < 1 at grid point {self.point}")


class ParameterError(PrimlatError, ValueError):
    """A tuning parameter (truncation depth, cutoff) is out of its valid range."""


class EmptyDomainError(PrimlatError):
    """A grid mode selected no points, so no average exists."""


class SingularityError(PrimlatError, ZeroDivisionError):
    """A closed-form product has a vanishing factor denominator."""


class TailModeError(PrimlatError):
    """A rigorous tail bound was requested for a function outside the unit bound."""


class ConfigError(PrimlatError):
    """The experiment configuration failed to parse or validate."""
