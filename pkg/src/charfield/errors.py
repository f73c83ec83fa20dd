"""Exception types shared across the package.

Plain division by zero raises the builtin ZeroDivisionError; unreadable or
unwritable cache paths surface as OSError.  Everything domain-specific gets
its own class below so callers can discriminate without string matching.
"""


class CharfieldError(Exception):
    """Base class for all errors raised by this package."""


class NonPrime(CharfieldError):
    """A modulus or characteristic that must be prime is not."""


class SizeExceeded(CharfieldError):
    """The requested field or scan exceeds the configured size cap."""


class FactorizationIncomplete(CharfieldError):
    """Integer factorization gave up within its budget."""


class ContextMismatch(CharfieldError):
    """Operands belong to different field contexts."""


class ZeroElement(CharfieldError):
    """The zero element was passed where a unit is required."""


class ZeroPolynomial(CharfieldError):
    """The zero polynomial was passed where a nonzero one is required."""


class NotADivisor(CharfieldError):
    """A polynomial or integer does not divide the required modulus."""


class NotAGenerator(CharfieldError):
    """The element does not generate the extension over the base field."""


class PreconditionFailed(CharfieldError):
    """An operation's stated precondition does not hold."""


class HypothesisFailed(CharfieldError):
    """The hypothesis of the bound being verified does not hold."""


class BothTrivial(CharfieldError):
    """Both characters are trivial, so no nontrivial statement applies."""


class SearchExhausted(CharfieldError):
    """A bounded deterministic search ended without a witness."""


class UndefinedEverywhere(CharfieldError):
    """A character sum whose summation domain is empty."""
