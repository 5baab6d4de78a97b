"""Exception types shared across the package."""

from __future__ import annotations


class WindowExceededError(ValueError):
    """A path was evaluated or shifted outside its sampled window."""


class DivergenceError(ArithmeticError):
    """A trajectory left the finite range. Carries the first bad time."""

    def __init__(self, t: float, message: str | None = None):
        self.t = float(t)
        super().__init__(message or f"trajectory diverged at t={t:.6g}")


class CalibrationError(RuntimeError):
    """No admissible constant was found within the search range."""
