"""Exception hierarchy shared across the package."""


class TravelFieldError(Exception):
    """Base class for all package errors."""


class GridRangeError(TravelFieldError, IndexError):
    """An index or lag lies outside the grid."""


class OutOfDomainError(TravelFieldError):
    """Sampling footprint leaves the extended field.

    ``required_size`` is the smallest square extended-grid size that would
    have contained the footprint, when it can be computed.
    """

    def __init__(self, message, required_size=None):
        super().__init__(message)
        self.required_size = required_size


class ReplanError(OutOfDomainError):
    """A random draw exceeded the planned extended grid."""


class PlanningError(TravelFieldError):
    """The extended grid cannot be planned (e.g. singular flow in the domain)."""


class SpectrumError(TravelFieldError):
    """Invalid spectrum specification or unsupported evaluation."""


class SymmetryError(SpectrumError):
    """Spectrum lacks the Hermitian symmetry needed for a real field."""


class DegeneratePathError(TravelFieldError):
    """The propagation-path matrix is singular or ill conditioned."""


class FlowDomainError(TravelFieldError):
    """Flow evaluated at one of its singular points."""


class OracleError(TravelFieldError):
    """Cholesky oracle failed (covariance not positive semidefinite)."""


class ConfigError(TravelFieldError, ValueError):
    """Scenario configuration failed to parse or validate."""
