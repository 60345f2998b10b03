"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: configuration errors exit 1,
numerical/physicality errors exit 2, I/O errors (plain OSError) exit 3.
"""


class ConfigurationError(Exception):
    """Invalid parameters, grids, or preconditions."""


class GridTruncationError(ConfigurationError):
    """Too much analytic spectral mass falls outside the frequency grid."""


class NumericsError(Exception):
    """A numerical routine failed or produced an inconsistent result."""


class PhysicalityError(NumericsError):
    """A covariance matrix violates the bosonic uncertainty bound."""

    def __init__(self, message: str, min_symplectic_eigenvalue: float):
        super().__init__(message)
        self.min_symplectic_eigenvalue = min_symplectic_eigenvalue
