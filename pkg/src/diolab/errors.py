"""Semantic exceptions shared across the package."""

from __future__ import annotations

__all__ = [
    "ConvergenceError",
    "DiolabError",
    "ResourceBudgetError",
    "UndefinedBoundError",
    "UndefinedRatioError",
]


class DiolabError(Exception):
    """Base class for package-specific failures."""


class UndefinedRatioError(DiolabError):
    """A ratio of partial sums was requested with a zero denominator."""


class UndefinedBoundError(DiolabError):
    """A lower bound was requested with a zero pair-sum denominator."""


class ResourceBudgetError(DiolabError):
    """An enumeration or sweep exceeded its configured budget."""


class ConvergenceError(DiolabError):
    """Adaptive integration failed to reach the requested tolerance.

    Carries the best available value and its error bracket.
    """

    def __init__(self, message: str, best_value: float, error_bound: float):
        super().__init__(message)
        self.best_value = best_value
        self.error_bound = error_bound
