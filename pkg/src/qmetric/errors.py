"""Exception types shared across the toolkit."""

from __future__ import annotations


class QMetricError(Exception):
    """Base class for all toolkit errors."""


class InvalidInputError(QMetricError, ValueError):
    """Input data violates a precondition (non-finite entries, bad sizes, ...)."""


class ShapeError(InvalidInputError):
    """Dimensions of the operands do not match."""


class SingularInputError(InvalidInputError):
    """An input required to be invertible is numerically singular."""


class UnsupportedDimensionError(InvalidInputError):
    """The requested operation is only available at smaller dimensions."""


class UnboundedProblemError(QMetricError):
    """The optimization problem has no finite optimum."""


class NotALipNormError(QMetricError):
    """A seminorm failed the kernel check and cannot serve as a Lip-norm."""


class InvalidBridgeError(InvalidInputError):
    """A bridge specification violates its structural requirements."""


class ContractError(QMetricError):
    """A caller-supplied object broke its documented contract (e.g. non-unital map)."""


class ConfigValidationError(QMetricError):
    """Scenario configuration failed validation; carries the full error list."""

    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = list(errors)
