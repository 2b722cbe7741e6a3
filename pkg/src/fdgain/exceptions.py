"""Exception types raised by fdgain."""


class FdgainError(ValueError):
    """Base class for all validation errors raised by this package."""


class DimensionError(FdgainError):
    """Array shapes are inconsistent with each other or with N, L, N_P."""


class NotHermitianError(FdgainError):
    """A matrix expected to be Hermitian is not, within tolerance."""


class NotPSDError(FdgainError):
    """A matrix expected to be positive semi-definite has a negative eigenvalue."""

    def __init__(self, message, min_eigenvalue=None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class ParameterError(FdgainError):
    """A scalar parameter is out of its admissible range."""


class RankError(FdgainError):
    """A pilot Gram matrix is singular, so the LS problem has no unique solution."""

    def __init__(self, message, subcarrier=None):
        super().__init__(message)
        self.subcarrier = subcarrier


class DegenerateCovarianceError(FdgainError):
    """tr(AB) is not positive, so the sum-MSE gain is undefined."""
