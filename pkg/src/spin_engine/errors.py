"""Exception types shared across the package."""


class EngineError(Exception):
    """Base class for errors raised by this package."""


class InvalidInputError(EngineError, ValueError):
    """An argument violates a documented precondition."""


class DomainError(EngineError, ValueError):
    """A scalar function is undefined at an eigenvalue."""


class SingularReferenceError(EngineError, ValueError):
    """Relative entropy requested against a rank-deficient reference state."""


class NoEngineRegimeError(EngineError):
    """Efficiency was requested where the cycle never runs as an engine."""


class GridNotClosedError(EngineError, ValueError):
    """The sweep grid is not closed under the (alpha, phi) -> (pi - alpha, phi + pi) map."""


class ConfigError(EngineError, ValueError):
    """Invalid run configuration or command-line flags."""
