"""Exception types shared across the package."""


class PercoptError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(PercoptError, ValueError):
    """An argument is outside its documented domain."""


class DegenerateDistributionError(ParameterError):
    """Operation requires a distribution with positive mean degree."""


class SupercriticalError(PercoptError, ValueError):
    """Quantity is only defined below the outbreak threshold."""


class ConvergenceError(PercoptError, RuntimeError):
    """A numerical routine failed to converge; carries the last iterate."""

    def __init__(self, message, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate


class InfeasibleError(PercoptError, RuntimeError):
    """No admissible solution exists for the requested targets.

    ``reason`` is ``"target"`` when the outreach goal is unreachable even
    with every node incentivized, ``"budget"`` when a budget cap is the
    obstruction.  ``max_achievable`` reports the best attainable value of
    the violated quantity.
    """

    def __init__(self, message, reason, max_achievable=None):
        super().__init__(message)
        self.reason = reason
        self.max_achievable = max_achievable


class ConfigError(PercoptError, ValueError):
    """A run-configuration file is malformed; message names the field."""
