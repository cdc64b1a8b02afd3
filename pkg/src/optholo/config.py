"""Library-wide defaults and exception types."""

from dataclasses import dataclass


class OpthError(Exception):
    """Base class for errors raised by this package."""


class ValidationError(OpthError, ValueError):
    """Malformed input: bad index, dimension mismatch, open loop, ..."""


class TruncationError(OpthError):
    """The truncated Fock space is too small for the requested parameters."""


@dataclass(frozen=True)
class Defaults:
    max_dim: int = 20000
    dense_max_dim: int = 4000
    squeeze_bound: float = 0.5
    series_threshold: float = 1e-3
    fd_step: float = 1e-5
    fd_step_min: float = 1e-9
    richardson_tol: float = 1e-6
    curvature_step: float = 1e-4
    cutoff_n1: int = 24
    cutoff_n2: int = 12
    cutoff_other: int = 8


DEFAULTS = Defaults()


def default_cutoff(n: int) -> int:
    """Recommended cutoff for ``n`` control modes (``n + 1`` oscillators)."""
    if n == 1:
        return DEFAULTS.cutoff_n1
    if n == 2:
        return DEFAULTS.cutoff_n2
    return DEFAULTS.cutoff_other
