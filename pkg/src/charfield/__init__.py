"""Exact incomplete mixed character sums over finite field towers.

The package realizes F_{q^m}/F_q explicitly, evaluates sums of the form
sum over x in F_q of chi(theta + x) psi(x) together with their square-root
bounds, counts primitive and normal elements on lines, and verifies the
sieve lower bound behind those counts.  See README.md for the tour.
"""

from .errors import (
    BothTrivial,
    CharfieldError,
    ContextMismatch,
    FactorizationIncomplete,
    HypothesisFailed,
    NonPrime,
    NotADivisor,
    NotAGenerator,
    PreconditionFailed,
    SearchExhausted,
    SizeExceeded,
    UndefinedEverywhere,
    ZeroElement,
    ZeroPolynomial,
)
from .intfuncs import IntFactorization, factor_int, is_prime
from .tower import DEFAULT_SEED, DEFAULT_SIZE_CAP, FFElement, TowerContext, build_tower, field_arith

__version__ = "0.1.0"
