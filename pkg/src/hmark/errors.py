"""Semantic exception hierarchy.

Every error raised by this package derives from :class:`HmarkError`, so
callers can catch one base class.  The subclasses split into configuration /
validation problems (bad parameters, non-positive densities, unsupported
requests) and numerical problems detected at run time (resolvent poles,
vanishing amplitudes, unresolvable phases).  The CLI maps the first group to
exit code 1 and the second to exit code 2.
"""


class HmarkError(Exception):
    """Base class for all package errors."""


# --- validation / configuration -------------------------------------------

class BadParameter(HmarkError, ValueError):
    """A scalar parameter is outside its admissible range."""


class NonPositiveDensity(HmarkError, ValueError):
    """Sampled spectral density is negative somewhere on one period."""


class DistributionalDensity(HmarkError, ValueError):
    """The density is a Dirac comb; pointwise evaluation is undefined."""


class LowerHalfPlane(HmarkError, ValueError):
    """A self-energy evaluation point does not satisfy Im z > 0."""


class OutOfRange(HmarkError, ValueError):
    """Combinatorial order outside the supported range."""


class GridMismatch(HmarkError, ValueError):
    """Time step does not divide the coupling period."""


class BadQuadrature(HmarkError, ValueError):
    """Non-positive contour height, frequency cutoff or node count."""


class UnsupportedKind(HmarkError, ValueError):
    """The coupling kind has no implemented mode discretization."""


class DimensionTooLarge(HmarkError, ValueError):
    """Dense eigendecomposition of the requested system is not feasible."""


class InvalidState(HmarkError, ValueError):
    """Density-matrix invariants (hermiticity, trace, positivity) violated."""


class InvalidAmplitude(HmarkError, ValueError):
    """Survival amplitude outside the admissible disk, or zero where a
    logarithm is required."""


class IndexOutOfRange(HmarkError, IndexError):
    """Time-pair indices fall outside the sampled grid."""


class TraceTooShort(HmarkError, ValueError):
    """The amplitude trace does not span enough periods for the check."""


class ConfigError(HmarkError, ValueError):
    """Experiment configuration cannot be parsed or fails validation."""


class IoError(HmarkError, OSError):
    """Artifact could not be written."""


# --- numerical -------------------------------------------------------------

class ResolventPole(HmarkError, ArithmeticError):
    """The resolvent denominator vanished at a quadrature node."""


class AmplitudeNearZero(HmarkError, ArithmeticError):
    """|a(t)| fell below the rate-extraction threshold; rates undefined."""


class PhaseJump(HmarkError, ArithmeticError):
    """Adjacent samples differ in phase by pi or more; grid too coarse to
    unwrap."""
