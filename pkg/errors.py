"""
Exception hierarchy for the blow-up toolkit.

Quadrature non-convergence is reported as a flag on the result object, not raised.
"""


class ToolkitError(Exception):
    """Base class for every toolkit error."""


class DomainError(ToolkitError, ValueError):
    """An argument violates an operation's precondition."""


class DivergentMomentError(DomainError):
    """A half-line or radial moment is not integrable for the given exponents."""


class DegenerateDimensionError(DomainError):
    """The space of algebraic Weyl tensors is trivial in this dimension."""


class ConfigError(ToolkitError, ValueError):
    """Invalid configuration file, CLI flag or parameter combination."""


class SlowConvergenceError(ToolkitError):
    """The series route converges too slowly; the caller falls back to quadrature."""


class NoRealRootError(ToolkitError):
    """The quadratic p_n has no real root, so f(s) = a0 - s cannot be built."""
