"""Errors raised by `teich_window`.

Every class derives from `TeichWindowError` and from the builtin exception
closest to its meaning, so callers may catch either.
"""
from typing import Sequence

class TeichWindowError(Exception):
    """Base class of the package errors."""

class StructuralError(TeichWindowError, ValueError):
    """Malformed pants decomposition."""

class CurveLookupError(TeichWindowError, LookupError):
    """Unknown pants or curve identifier."""

    def __str__(self) -> str:
        # LookupError would otherwise quote the message
        return str(self.args[0]) if self.args else ''

class UsageError(TeichWindowError, ValueError):
    """Invalid combination of inputs."""

class DomainError(TeichWindowError, ValueError):
    """Argument outside the domain of a formula."""

class NumericError(TeichWindowError, ArithmeticError):
    """Non-finite or degenerate floating point intermediate."""

class NonHyperbolicError(NumericError):
    """Holonomy element with |trace| <= 2."""

class InconsistentObservationsError(TeichWindowError, ValueError):
    """No twist reproduces the observed lengths."""

class NonCauchyError(TeichWindowError, ValueError):
    """Coordinates of a sequence with growing successive differences.

    Attributes:
      indices: offending curve indices.
    """

    def __init__(self, indices: Sequence[int]):
        self.indices = tuple(indices)
        super().__init__(('Successive differences grow at curve indices: '
                          f'{list(self.indices)}'))

class InvariantViolation(TeichWindowError, AssertionError):
    """A hard run time check failed."""
