"""Exception hierarchy shared by all modules."""


class InthullError(Exception):
    """Base class for library errors."""


class DimensionError(InthullError, ValueError):
    pass


class RankError(InthullError, ValueError):
    pass


class SingularMatrixError(InthullError, ValueError):
    pass


class CapExceededError(InthullError):
    """A desk-scale enumeration would exceed its configured cap."""


class CoverError(InthullError, ValueError):
    pass


class PreconditionError(InthullError, ValueError):
    pass


class BoundednessError(InthullError, ValueError):
    """The polyhedron is unbounded and no box was supplied."""


class CertificationError(InthullError):
    """A certificate condition failed.

    ``reason`` is one of ``"stacked_form"``, ``"not_tu"``, ``"span"``.
    """

    def __init__(self, reason, message):
        super().__init__(message)
        self.reason = reason


class InternalConsistencyError(InthullError, AssertionError):
    """A guarantee that the construction proves was violated at runtime."""
