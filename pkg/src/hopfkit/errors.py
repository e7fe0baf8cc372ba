"""Exception hierarchy shared by every hopfkit module."""

from __future__ import annotations


class HopfkitError(Exception):
    """Base class for all toolkit errors."""


class ArgumentError(HopfkitError, ValueError):
    """Inconsistent or out-of-range arguments (mismatched jets, bad geometry, ...)."""


class SingularityError(HopfkitError, ZeroDivisionError):
    """Division by a jet (or value) that vanishes."""


class DomainError(HopfkitError, ValueError):
    """Evaluation outside the real domain of an elementary function."""


class NonDifferentiableError(DomainError):
    """A derivative was requested where the function is not differentiable."""


class ParseError(HopfkitError, ValueError):
    """Expression syntax error carrying a 0-based character position."""

    def __init__(self, message: str, position: int, source: str = ""):
        self.position = position
        self.source = source
        self.reason = message
        super().__init__(f"{message} at position {position}")

    def caret(self) -> str:
        """Two-line diagnostic with a caret under the offending character."""
        return f"{self.source}\n{' ' * self.position}^"


class UnboundVariableError(HopfkitError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unbound variable"


class ShootingError(HopfkitError):
    """The shooting iteration could not match the far boundary value."""


class ReductionError(HopfkitError):
    """The reduction-of-order construction broke down (early blow-up, span collapse)."""


class BarrierError(ArgumentError):
    """A barrier could not be constructed with strictly positive parameter slack."""


class MonotonicityError(HopfkitError):
    """dK/dz_{n+2} was found non-positive at a quadrature node."""


class CapabilityError(HopfkitError):
    """The function oracle cannot supply the requested derivative order."""
