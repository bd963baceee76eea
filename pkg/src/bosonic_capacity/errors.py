"""Exception and warning types shared across the package."""


class CapacityError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(CapacityError, ValueError):
    """An argument lies outside the domain of the function."""


class SolverError(CapacityError, ArithmeticError):
    """A numerical routine failed to produce a result."""


class NoSignChange(SolverError):
    pass


class NoConvergence(SolverError):
    pass


class RangeExhausted(SolverError):
    """Bracket search ran out of doublings; usually an infeasible target."""


class Infeasible(SolverError):
    pass


class ProfileMismatch(CapacityError, ValueError):
    pass


class DimensionMismatch(CapacityError, ValueError):
    pass


class TooManyModes(CapacityError, ValueError):
    pass


class ConfigError(CapacityError, ValueError):
    """Invalid channel configuration. ``key`` names the offending entry."""

    def __init__(self, key, message):
        self.key = key
        super().__init__(f"{key}: {message}")


class FarFieldInvalidWarning(UserWarning):
    """Fresnel number at the cutoff is too large for the far-field model."""


class TransmissivityClampWarning(UserWarning):
    pass
