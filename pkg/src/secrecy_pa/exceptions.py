"""Exception types raised across the package."""


class SecrecyPAError(Exception):
    """Base class for package errors."""


class PreconditionError(SecrecyPAError, ValueError):
    """An argument violates an operation's documented precondition."""


class NotPSDError(PreconditionError):
    """A matrix expected to be positive semidefinite has a negative eigenvalue."""


class DegenerateChannelError(SecrecyPAError, ValueError):
    """A channel matrix is rank deficient or has no null space."""
