"""Exception types raised by the toolkit.

Every precondition failure derives from :class:`DomainError`, itself a
``ValueError``, so callers that only care about bad input can catch that.
"""


class DomainError(ValueError):
    """An input violates a model precondition."""


class BelowReferenceDistanceError(DomainError):
    """Distance below the 1 m close-in reference distance."""


class OutOfValidityError(DomainError):
    """Input lies outside the validity range of an empirical correction."""


class EmptyInputError(DomainError):
    pass


class InsufficientBeamsError(DomainError):
    pass


class DegenerateFitError(DomainError):
    """The fitted parameter cannot be identified from the samples."""


class UnidentifiableError(DegenerateFitError):
    pass


class OutOfRangeError(DomainError):
    """A range query has no solution inside the search bracket."""


class FormatError(ValueError):
    """A data file cannot be read at all."""


class BelowFreeSpaceWarning(UserWarning):
    """An effective path loss exponent dropped below free space (n < 2)."""
