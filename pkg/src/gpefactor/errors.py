"""Exception hierarchy shared by the library and the command line."""


class GPEError(Exception):
    """Base class for all package errors."""


class InputError(GPEError, ValueError):
    """Malformed or non-conformable input."""


class PoleError(GPEError, ValueError):
    """Evaluation point lies on (or too close to) a pole or pole sphere."""

    def __init__(self, message, nearest=None):
        super().__init__(message)
        self.nearest = nearest


class NumericalError(GPEError, ArithmeticError):
    """A numerical procedure failed or produced an inconsistent result."""


class UnsupportedStructureError(NumericalError):
    """Spectral structure outside what the factorization handles."""


class NotDirectSumError(NumericalError):
    """Two subspaces fail to form a direct sum of the ambient space."""


class NotEvenError(GPEError):
    """The function does not satisfy the evenness symmetry."""


class NotGPEError(GPEError):
    """The function is not generalized positive even."""


class SingularFeedthroughError(NotGPEError):
    """Value at infinity is singular; the regularized factorization is needed."""


class InfeasibleError(GPEError):
    """An interpolation problem has no solution of the requested kind."""
