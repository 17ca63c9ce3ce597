"""Exception hierarchy for the spectralfactors package.

All errors signal either a violated precondition (the input is outside the
supported class) or a numerical breakdown (a rank/definiteness decision could
not be made at the configured tolerances).  Mathematical failure of a
*candidate* object under verification is reported through reports, not
exceptions.
"""


class SpectralFactorsError(Exception):
    """Base class for all package errors."""


# --- dense matrix kernels ---------------------------------------------------

class SingularSteinOperator(SpectralFactorsError):
    """The linearized Stein operator is rank deficient (eigenvalue pair with
    product one)."""


class NotPositiveDefinite(SpectralFactorsError):
    """A symmetric matrix required to be positive definite is not."""


class RankDeficientBasis(SpectralFactorsError):
    """A matrix supplied as a subspace basis does not have full column rank."""


class AmbiguousEigenspace(SpectralFactorsError):
    """A selected eigenvalue has multiplicity greater than one; the invariant
    subspace is not unique and an explicit basis must be supplied."""


class ComplexPairSplit(SpectralFactorsError):
    """A selection includes only one member of a complex-conjugate eigenvalue
    pair; pairs must be selected atomically."""


# --- state-space algebra ----------------------------------------------------

class DimensionMismatch(SpectralFactorsError):
    """Realization dimensions are incompatible for the requested operation."""


class EvaluationAtPole(SpectralFactorsError):
    """Evaluation point is too close to a pole of the realization."""


class SingularFeedthrough(SpectralFactorsError):
    """The feedthrough matrix D is singular or too ill conditioned to
    invert."""


class SingularStateMatrix(SpectralFactorsError):
    """The state matrix A is singular; shift the realization first (Moebius
    change of variable)."""


class ParameterHitsSpectrum(SpectralFactorsError):
    """The Moebius parameter collides with the spectrum of the state
    matrix."""


class NoParameterFound(SpectralFactorsError):
    """No admissible Moebius parameter was found (practically
    unreachable)."""


# --- extremal factors and conjugate phase -----------------------------------

class NotOuter(SpectralFactorsError):
    """The supplied realization is not a valid outer (minimum-phase) factor:
    poles or zeros are not strictly inside the unit circle, the state or zero
    matrix is singular, or the zero-direction Stein solution fails to be
    negative definite."""


class NotPositiveDefiniteY(SpectralFactorsError):
    """The pole-direction Stein solution fails to be positive definite."""


class GramianIdentityViolation(SpectralFactorsError):
    """The structural Gramian of the conjugate phase function violates its
    defining identities beyond tolerance."""


# --- all-pass divisors --------------------------------------------------------

class InvalidSubspace(SpectralFactorsError):
    """A subspace specification does not describe an invariant subspace of
    the conjugate phase state matrix."""


class NotInvariant(SpectralFactorsError):
    """The range of the supplied projector is not an invariant subspace."""


class CompressionNotPD(SpectralFactorsError):
    """I + C P C^T failed the positive-definiteness check for the supplied
    projector."""


class DegreeAdditivityViolation(SpectralFactorsError):
    """Left and right divisor degrees do not add up to the degree of the
    conjugate phase function; signals a numerical rank failure."""


# --- factor generation and verification --------------------------------------

class DegreeViolation(SpectralFactorsError):
    """A generated factor does not have the expected McMillan degree
    (numerical failure signal)."""


class SpectrumMismatch(SpectralFactorsError):
    """A generated factor does not reproduce the spectral density of the
    outer factor (numerical failure signal)."""


class NotAFactor(SpectralFactorsError):
    """The candidate is not a spectral factor of the same spectral density
    (extracted quotient is not all-pass)."""


class NotMinimalFactor(SpectralFactorsError):
    """The candidate is a spectral factor but not minimal (divisor degree
    additivity fails)."""
