"""Exception types shared across the library."""


class SwreconError(Exception):
    """Base class for all library errors."""


class InvalidInputError(SwreconError, ValueError):
    """Arguments violate an operation's preconditions."""


class CalibrationError(SwreconError):
    """A numeric calibration failed to converge or fit within tolerance."""


class SeedNotFoundError(SwreconError):
    """No qualifying seed clique exists for the requested category iteration.

    Usually signals parameter miscalibration (clique size or diameter floor
    too demanding for the instance at hand).
    """

    def __init__(self, message, iteration=None):
        super().__init__(message)
        self.iteration = iteration


class EstimateUnavailableError(SwreconError):
    """A distance estimate cannot be produced (no edges, no common beacon,
    or no admissible path)."""


class ResourceExceededError(SwreconError):
    """An exact search exceeded its configured state budget.

    Raised instead of silently approximating; the caller decides whether to
    retry with a larger budget.
    """


class AdaptiveSearchError(SwreconError):
    """The adaptive pruning search found no parameter pair that keeps the
    graph connected."""


class ConfigError(SwreconError, ValueError):
    """Experiment configuration failed schema validation."""
