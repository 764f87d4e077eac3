"""Exception types shared across the package."""
from __future__ import annotations

from typing import Any


class EulerLabError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(EulerLabError, ValueError):
    """An argument violates a documented precondition."""


class IntegrationError(EulerLabError, ArithmeticError):
    """The scheme produced a non-finite slope and cannot continue.

    Carries enough state to reproduce the failing step.
    """

    def __init__(self, step: int, t: float, y: Any, message: str | None = None):
        self.step = int(step)
        self.t = float(t)
        self.y = y
        if message is None:
            message = (
                f"non-finite right-hand side at step {self.step} "
                f"(t={self.t!r}, y={self.y!r})"
            )
        super().__init__(message)


class EvaluationError(EulerLabError, ArithmeticError):
    """A right-hand side returned a non-finite value outside an integration."""


class FitError(EulerLabError, ValueError):
    """A rate regression was requested on insufficient or degenerate data."""


class ConfigError(EulerLabError, ValueError):
    """An experiment configuration file failed to parse or validate.

    ``field`` identifies the offending entry (dotted path) when known.
    """

    def __init__(self, message: str, field: str | None = None):
        self.field = field
        if field:
            message = f"{field}: {message}"
        super().__init__(message)
