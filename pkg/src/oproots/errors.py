"""Exception and warning types shared across the package."""


class OpRootsError(Exception):
    """Base class for all errors raised by :mod:`oproots`."""


class DimensionMismatch(OpRootsError, ValueError):
    pass


class BadMatrix(OpRootsError, ValueError):
    """Input is not a finite square complex matrix (or a malformed JSON document)."""


class Singular(OpRootsError):
    """A matrix is numerically singular (smallest LU pivot below threshold)."""


class NoConvergence(OpRootsError):
    pass


class NegativeSpectrum(OpRootsError):
    """An eigenvalue lies on (or within tolerance of) the closed negative real axis."""


class ImaginarySpectrum(OpRootsError):
    """An eigenvalue lies on (or within tolerance of) the imaginary axis."""


class SpectraNotSeparated(OpRootsError):
    pass


class QuadratureStall(OpRootsError):
    pass


class PreconditionFailed(OpRootsError):
    pass


class HypothesisFailed(OpRootsError):
    pass


class EpsilonStall(OpRootsError):
    pass


class RankAmbiguous(OpRootsError):
    pass


class SeriesTruncation(OpRootsError):
    pass


class PreprocessingOverflow(OpRootsError):
    pass


class GenerationExhausted(OpRootsError):
    pass


class IterationError(OpRootsError):
    """An iteration stopped without converging; the partial trace is attached."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class SingularIterate(IterationError):
    pass


class MaxIter(IterationError):
    pass


class HypothesisWarning(UserWarning):
    """A sufficient hypothesis of a convergence theorem could not be verified.

    The run continues; the hypotheses are sufficient, not necessary.
    """


class CertificateFailed(OpRootsError):
    """A computed result failed one of its own post-condition checks."""


class RegionViolation(HypothesisWarning):
    """The numerical range leaves the scalar convergence region assumed by a theorem."""
