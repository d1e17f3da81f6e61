"""Exception hierarchy shared by every module of the toolkit."""


class BusecoarseError(Exception):
    """Base class for all toolkit errors."""


class InvalidPointError(BusecoarseError, ValueError):
    """A point does not belong to the space it was used with."""


class InvalidSpaceError(BusecoarseError, ValueError):
    """A space descriptor is malformed or not allowed in this context."""


class DomainError(BusecoarseError, ValueError):
    """A scalar parameter lies outside its admissible range."""


class PreconditionError(BusecoarseError, ValueError):
    """An operation was called with inputs violating its precondition."""


class UnsupportedConfigurationError(PreconditionError):
    """The inputs are valid but the operation deliberately does not handle them."""


class CoverageError(PreconditionError):
    """A point is not covered by any member of a cover."""


class UnreachableError(PreconditionError):
    """Two points lie in different connected components."""


class EvaluationError(BusecoarseError, ValueError):
    """A user-supplied function returned a non-finite value."""


class InvariantViolation(BusecoarseError, RuntimeError):
    """An internal invariant that should always hold was found broken."""
