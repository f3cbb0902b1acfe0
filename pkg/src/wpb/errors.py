"""Exception types shared across the package."""


class WpbError(Exception):
    """Base class for all errors raised by wpb."""


class DomainError(WpbError, ValueError):
    """An input lies outside the mathematical domain of an operation."""


class DomainTooSmallError(DomainError):
    """A wave packet is not contained in the grid domain."""


class NumericalFailure(WpbError, ArithmeticError):
    """A computation produced non-finite or otherwise unusable numbers."""


class StepSizeError(NumericalFailure):
    """Grid evolution drifted in norm; the time step is too large."""


class DecayUnderflowError(NumericalFailure):
    """Imaginary-time decay pushed the norm below representable range."""


class DegenerateBasisError(NumericalFailure):
    """No significant directions remain in an overlap (Gram) matrix."""


class NoStationarySolutionError(NumericalFailure):
    """The double well is too shallow to hold a stationary Gaussian."""


class NoInstantonError(NumericalFailure):
    """There is no barrier between the turning points."""


class ConfigError(WpbError, ValueError):
    """Invalid scenario configuration."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key
