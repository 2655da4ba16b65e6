"""Exception hierarchy.

Configuration problems (bad schema, malformed literals) raise ConfigError;
everything else signals a violated mathematical precondition and maps to
CLI exit code 2.
"""


class WeaktomoError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(WeaktomoError):
    """Operands live on Hilbert spaces of different dimension."""


class EigendecompositionError(WeaktomoError):
    """Eigensolver failed or produced an unacceptable reconstruction residual."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class NotPositiveSemidefinite(WeaktomoError):
    """An operator required to be PSD has an eigenvalue below -1e-10."""


class InvalidEffect(WeaktomoError):
    """A measurement effect is not PSD or exceeds the identity."""


class ZeroWeightOutcome(WeaktomoError):
    """Default weights requested but some POVM element has zero trace."""


class BadWeights(WeaktomoError):
    """Explicit outcome weights are non-positive, mis-sized, or do not sum to 1."""


class StrengthZeroNotInvertible(WeaktomoError):
    """Statistics taken at strength 0 carry no state information; inversion is undefined."""


class FrameIncomplete(WeaktomoError):
    """Reconstruction requested from a frame that does not span the operator space."""

    def __init__(self, message: str, rank: int):
        super().__init__(message)
        self.rank = rank


class InconsistentProbabilities(WeaktomoError):
    """A probability vector deviates from normalization beyond the finite-sample allowance."""


class ZeroProbabilityPostselection(WeaktomoError):
    """Post-selection on an outcome of (numerically) zero probability."""


class BadConditionalData(WeaktomoError):
    """Conditional statistics reconstruct to an operator whose trace is too far from 1."""


class SamplingFromQuasiDistribution(WeaktomoError):
    """Monte Carlo sampling requested from a table with negative cells."""


class EmptyPostselection(WeaktomoError):
    """No counts landed in the post-selected column."""


class TooFewSweepPoints(WeaktomoError):
    """Slope fitting needs at least four sweep points."""


class ConfigError(WeaktomoError):
    """Invalid run configuration (schema, literals, missing fields, IO)."""
