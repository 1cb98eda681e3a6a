"""Exception hierarchy shared across the package."""

from __future__ import annotations


class GraphMassError(Exception):
    """Base class for all library-specific failures."""


class ParseError(GraphMassError):
    """Syntax or validation error while parsing an expression."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class DomainError(GraphMassError):
    """Evaluation left the mathematical domain of an operation."""


class UnboundParameterError(GraphMassError):
    """An expression parameter was not bound before evaluation."""


class QuadratureError(GraphMassError):
    """A quadrature routine could not produce a trustworthy result."""


class IntegrabilityError(QuadratureError):
    """Tail fit indicates the integrand decays too slowly to integrate."""


class BodyError(GraphMassError):
    """Invalid convex body or surface operation."""


class NonConvexError(BodyError):
    """A body failed its convexity check."""


class HypothesisError(GraphMassError):
    """A scenario violates a hypothesis required by the requested check."""


class ConfigError(GraphMassError):
    """Invalid run configuration."""
