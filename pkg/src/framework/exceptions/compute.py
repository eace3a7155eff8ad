from typing import Any, Dict, Optional, Sequence

from .base import FrameworkException


class ComputeException(FrameworkException):
    """
    Base exception class for numerical errors.

    This includes:
    - Shape mismatches
    - Values outside an operation's mathematical domain
    - Non-finite losses during optimisation
    """

    default_message = "A numerical error occurred"
    default_code = "COMPUTE_ERROR"


class DimensionError(ComputeException):
    """Exception raised for incompatible tensor shapes; names both shapes."""

    default_message = "Incompatible shapes"
    default_code = "DIMENSION_ERROR"

    def __init__(
        self,
        message: Optional[str] = None,
        code: Optional[str] = None,
        details: Optional[Dict[str, Any]] = None,
        shapes: Optional[Sequence[Sequence[int]]] = None,
    ):
        details = details or {}
        message = message or self.default_message
        if shapes:
            details["shapes"] = [list(s) for s in shapes]
            message = f"{message}: " + " vs ".join(str(tuple(s)) for s in shapes)
        super().__init__(message=message, code=code, details=details)


class DomainError(ComputeException):
    """Exception raised when an operation receives values outside its domain."""

    default_message = "Value outside operation domain"
    default_code = "DOMAIN_ERROR"


class NumericFailureError(ComputeException):
    """Exception raised when training produces a non-finite loss."""

    default_message = "Non-finite value encountered"
    default_code = "NUMERIC_FAILURE"
