"""Exception hierarchy shared by the package."""


class TropBasisError(Exception):
    """Base class for every error raised on purpose by this package."""


class DivisionByZeroToCutoff(TropBasisError, ZeroDivisionError):
    """Divisor has no known terms below its cutoff."""


class CutoffExhausted(TropBasisError, ArithmeticError):
    """A decision needs more precision than the operands carry."""


class NotARealizer(TropBasisError, ValueError):
    """The permutation does not attain the tropical determinant."""


class NotSingular(TropBasisError, ValueError):
    """The matrix is symmetrically tropically nonsingular."""


class TranspositionNotFound(TropBasisError, RuntimeError):
    """No transposition-containing realizer of a singular 5x5 matrix.

    Existence is a theorem, so this signals a bug.
    """


class IterationLimitExceeded(TropBasisError, RuntimeError):
    """Normalization fix-ups did not settle within the step cap."""


class ClassificationGap(TropBasisError, RuntimeError):
    """A rank <= 3 matrix with neither joints nor the exceptional form."""

    def __init__(self, message, matrix=None):
        super().__init__(message)
        self.matrix = matrix


class DegreeMismatch(TropBasisError, ArithmeticError):
    """A solved lift entry came out at the wrong degree (genericity failure)."""


class NotOnHypersurface(TropBasisError, ValueError):
    """The target degrees are not on the relevant tropical hypersurface."""


class GenericityExhausted(TropBasisError, RuntimeError):
    """Every resampling of the generic coefficients failed."""


class CertificateInvalid(TropBasisError, ValueError):
    """A certificate does not re-verify against its matrix."""
