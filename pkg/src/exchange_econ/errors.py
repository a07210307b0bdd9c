"""Exception hierarchy shared across the package."""


class ExchangeEconError(Exception):
    """Base class for all errors raised by exchange_econ."""


class InvalidArgumentError(ExchangeEconError, ValueError):
    pass


class InvalidDecisionError(ExchangeEconError, ValueError):
    pass


class ConfigurationError(ExchangeEconError, ValueError):
    pass


class SizeError(ExchangeEconError, ValueError):
    """An exhaustive routine was asked to enumerate too many cases."""


class InfeasibleError(ExchangeEconError):
    """Demand rates lie outside the sustainability region.

    ``report`` carries the :class:`FeasibilityReport` when one is available.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class RegionError(InfeasibleError):
    """The bargaining benchmark has no feasible point."""

    def __init__(self, message, constraint=None):
        super().__init__(message)
        self.constraint = constraint


class EntityNotSelfSustainableError(InfeasibleError):
    """An entity's own plans cannot cover its own demand."""


class UndefinedBoundError(ExchangeEconError, ValueError):
    """A stability bound was requested for a demand vector on or outside the boundary."""
