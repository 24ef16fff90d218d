"""Exception hierarchy shared by the engine and the command line."""

from __future__ import annotations


class MGGError(Exception):
    """Base class for every error raised by the package."""


class DimensionError(MGGError, ValueError):
    pass


class UndefinedProductError(MGGError, ValueError):
    """Raised when a scalar product's definedness condition fails."""


class LabelClashError(MGGError, ValueError):
    pass


class IllFormedProductionError(MGGError, ValueError):
    pass


class DanglingEdgeError(MGGError):
    pass


class IncoherentSequenceError(MGGError):
    pass


class ConditionViolated(MGGError):
    """An application condition of the closed-form sequence image failed.

    ``condition`` names the first failing condition.
    """

    def __init__(self, condition: str, message: str = ""):
        self.condition = condition
        super().__init__(message or f"application condition {condition} violated")


class BudgetExceeded(MGGError):
    """A step or enumeration budget ran out before completion.

    ``result`` carries whatever partial result was available.
    """

    def __init__(self, message: str, result=None):
        super().__init__(message)
        self.result = result


class StuckCircuitError(MGGError):
    pass


class TapeDecodeError(MGGError, ValueError):
    pass


class ParseError(MGGError):
    def __init__(self, path: str, line: int, column: int, message: str):
        self.path = path
        self.line = line
        self.column = column
        self.message = message
        super().__init__(f"{path}:{line}:{column}: {message}")
