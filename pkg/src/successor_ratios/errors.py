"""Exception types shared across the package."""


class InvalidArgument(ValueError):
    """An argument violates an operation's precondition."""


class TableTooSmall(LookupError):
    """A sieve table does not cover the requested index or value.

    Callers are expected to rebuild the table with a larger limit.
    """


class InsufficientData(ValueError):
    """Not enough nonzero observations to fit a model."""


class InvariantViolation(RuntimeError):
    """A computed result contradicts a structural invariant."""
