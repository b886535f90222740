"""Exception types shared by the numeric modules."""

from __future__ import annotations

import cmath


class NumericsError(RuntimeError):
    """Raised when a numeric evaluation cannot produce a finite, trusted value."""


class PoleError(NumericsError):
    """Raised when an argument sits on (or numerically at) a pole."""


class DomainError(NumericsError, ValueError):
    """Raised when an argument falls outside the supported evaluation window."""


class NonConvergenceError(NumericsError):
    """Raised when a quadrature or series misses its requested tolerance."""


class TruncationError(NonConvergenceError):
    """Raised when a truncation length cannot certify the requested tolerance."""


class PreconditionError(NumericsError, ValueError):
    """Raised when an operation precondition (coprimality, q | h, ...) fails."""


class CharacterError(ValueError):
    """Raised when a character table violates a Dirichlet character law."""


class ConfigError(ValueError):
    """Raised when a run configuration is invalid."""


def ensure_finite(value: complex, what: str) -> complex:
    """Return ``value`` or raise when it is NaN or infinite."""
    if not cmath.isfinite(complex(value)):
        raise NumericsError(f"{what} is not finite")
    return value
