"""Exception types raised across the toolkit."""


class QlopsError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(QlopsError):
    """Configuration could not be parsed or references something missing."""


class ValidationError(ConfigError):
    """A configuration value violates a model invariant."""


class DomainError(QlopsError, ValueError):
    """A numeric argument is outside the domain of a formula."""


class UnreachableError(QlopsError):
    """No code distance in the allowed range reaches the requested error rate."""


class InfeasibleError(QlopsError):
    """A scenario or search has no admissible solution."""


class ModelRangeError(QlopsError, ValueError):
    """A fitted model was asked to evaluate outside its declared validity range."""
