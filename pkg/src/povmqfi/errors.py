"""Exception types shared across the package.

Validation errors carry the residual that broke the invariant so callers
(and the CLI) can report it.
"""

from __future__ import annotations


class ValidationError(ValueError):
    """An input violates a stated invariant."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual

    @property
    def kind(self) -> str:
        return type(self).__name__


class NotHermitian(ValidationError):
    pass


class NotPsd(ValidationError):
    pass


class TraceNotOne(ValidationError):
    pass


class CompletenessViolation(ValidationError):
    pass


class NotIsometry(ValidationError):
    pass


class NotUnitary(ValidationError):
    pass


class NotUnitaryTwist(NotUnitary):
    pass


class NotNormalized(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class BadRank(ValidationError):
    pass


class BadDimension(ValidationError):
    pass


class ConfigInvalid(ValueError):
    pass


class NumericalFailure(ArithmeticError):
    pass


class FlatLikelihood(NumericalFailure):
    pass


class ParseError(ValueError):
    pass
