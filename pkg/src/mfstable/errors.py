"""Exception hierarchy shared by the library and the command line.

Each family maps onto one process exit code in :mod:`mfstable.cli`.
"""


class MfstableError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class DomainError(MfstableError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""

    exit_code = 2


class ConfigError(MfstableError, ValueError):
    """Inconsistent model, estimator or experiment configuration."""

    exit_code = 2


class EmptyNeighborhoodError(ConfigError):
    """The localisation window around t0 contains no admissible index."""


class CapacityError(MfstableError, ValueError):
    """Requested size exceeds what the implementation supports."""

    exit_code = 2


class PathRangeError(MfstableError, IndexError):
    """A variation needs samples that the path does not contain."""

    exit_code = 2

    def __init__(self, msg, k=None):
        super().__init__(msg)
        self.k = k


class DegenerateDataError(MfstableError, ValueError):
    """The data carry no usable variation (constant or polynomial path)."""

    exit_code = 3


class NumericFailure(MfstableError, ArithmeticError):
    """Quadrature or root finding did not reach its tolerance."""

    exit_code = 4

    def __init__(self, msg, achieved=None):
        super().__init__(msg)
        self.achieved = achieved


class DegenerateKernelError(DomainError):
    """The kernel exponent H - 1/alpha is zero, so the raw kernel vanishes."""
