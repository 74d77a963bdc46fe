"""Exception types shared across the package.

All domain and precondition failures derive from ValueError so that callers
can catch the whole family with one clause; iteration failures derive from
RuntimeError because they signal a numerical breakdown, not bad input.
"""

from __future__ import annotations


class DomainError(ValueError):
    """An exponent tuple violates the structural hypotheses."""


class DegenerateDeltaError(DomainError):
    """The coupling determinant (k - m)(k - s) - p q vanishes (within tolerance)."""


class SigmaUndefinedError(DomainError):
    """The shooting exponent sigma requires k > m."""


class PreconditionError(ValueError):
    """An operation was invoked on inputs outside its stated preconditions."""


class NotABlowupError(ValueError):
    """Blow-up post-processing requested on a trajectory that did not blow up."""


class NoConvergenceError(RuntimeError):
    """Fixed-point iteration failed to contract within the iteration budget."""


class DegenerateStateError(ValueError):
    """A radial state cannot be mapped to logarithmic coordinates (zero denominator)."""


class InsufficientRangeError(ValueError):
    """A trajectory does not extend far enough for the requested asymptotic fit."""
