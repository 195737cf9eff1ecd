"""Exception and warning types shared across the package."""


class PairClicksError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(PairClicksError, ValueError):
    """A value lies outside its mathematical or physical domain."""


class DataError(PairClicksError, ValueError):
    """A config or data file failed validation; the message carries the location."""


class FitError(PairClicksError, RuntimeError):
    """Fitting cannot proceed (degenerate objective, unusable input)."""


class SimulationError(PairClicksError, RuntimeError):
    """The stochastic simulation hit a safety guard."""


class NegativeRateWarning(UserWarning):
    """Dark-count compensation produced a negative rate (kept, not clamped)."""
