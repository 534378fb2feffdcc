"""Shared exception types.

Every hard failure in the package raises a subclass of CayleyLabError so
callers can catch library errors without shadowing programming mistakes.
"""


class CayleyLabError(Exception):
    """Base class for all library errors."""


class NonPrimeError(CayleyLabError, ValueError):
    """Characteristic is not a prime number."""


class TooLargeError(CayleyLabError, ValueError):
    """A size cap (field size, group order, set size, ...) was exceeded."""


class ContextMismatchError(CayleyLabError, TypeError):
    """Operands belong to different field/group contexts."""


class BadDivisorError(CayleyLabError, ValueError):
    """Subfield index does not divide the extension degree."""


class NotInGroupError(CayleyLabError, ValueError):
    """Matrix fails the defining equations of the group."""


class NotEnumerableError(CayleyLabError, ValueError):
    """Operation needs full enumeration but the group exceeds the cap."""


class UnsupportedError(CayleyLabError, ValueError):
    """Requested combination of family/parameters is not supported."""


class SetTooLargeError(CayleyLabError, ValueError):
    """Combinatorial input set exceeds the documented size cap."""


class ZeroTorusParamError(CayleyLabError, ValueError):
    """A torus coordinate in a cell parameterization is zero."""


class EmptyGeneratorsError(CayleyLabError, ValueError):
    """A generator-measure was requested for an empty generator list."""


class NoProperSubfieldError(CayleyLabError, ValueError):
    """Subfield trap requested over a prime field (no proper subfield)."""


class DegreeTooLargeError(CayleyLabError, ValueError):
    """Polynomial degree exceeds the certificate cap."""


class NonGenericConjugatorError(CayleyLabError, ValueError):
    """The conjugating map fails a documented genericity condition."""


class EmptySetError(CayleyLabError, ValueError):
    """An element set that must be nonempty was empty."""


class InclusionFailedError(CayleyLabError, ValueError):
    """A ping-pong region inclusion failed at an exact sample point."""
