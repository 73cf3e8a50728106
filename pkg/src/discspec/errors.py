"""Exception types shared across the toolkit.

The CLI maps these onto its exit-code contract: config errors exit 1,
domain errors 2, precondition failures 3, tolerance failures 4.
"""


class DiscSpecError(Exception):
    """Base class for all toolkit errors."""


class DomainError(DiscSpecError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class PreconditionError(DiscSpecError, RuntimeError):
    """A hypothesis required by the invoked result does not hold."""


class NumericalError(DiscSpecError, RuntimeError):
    """An iterative kernel failed to converge or produced garbage."""


class InternalError(DiscSpecError, RuntimeError):
    """An invariant that should hold by construction was violated."""


class ConfigError(DiscSpecError, ValueError):
    """A configuration document failed to parse or validate."""


class ToleranceFailure(DiscSpecError, AssertionError):
    """A verification check missed its stated tolerance."""
