"""Exception hierarchy shared by all modules."""


class BohrSamplerError(Exception):
    """Base class for every error raised by this package."""


class HypothesisError(BohrSamplerError, ValueError):
    """A theorem's premises do not hold for the supplied inputs.

    Raising this signals that a certificate is inapplicable, not that the
    underlying statement failed.
    """


class IndependenceError(HypothesisError):
    """A family that must be strongly linearly independent is not."""


class RankDeficiencyError(BohrSamplerError, ValueError):
    """The sampling design matrix does not have full column rank."""

    def __init__(self, message, rank=None, condition_number=None):
        super().__init__(message)
        self.rank = rank
        self.condition_number = condition_number


class GridTooLargeError(BohrSamplerError, ValueError):
    """Refusing to materialize a grid above the configured cardinality cap."""


class ScheduleError(BohrSamplerError, ValueError):
    """Invalid or over-cap schedule parameters."""
