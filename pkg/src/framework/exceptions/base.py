"""
Base exception classes for the CT-GNN toolkit.

Every error raised by the toolkit derives from ``FrameworkException`` so the
CLI can map whole families of failures onto exit codes without catching
bare ``Exception``.
"""

from typing import Any, Dict, Optional


class FrameworkException(Exception):
    """
    Base exception class for all toolkit exceptions.

    Attributes:
        message (str): Human-readable error message.
        code (str): Error code for programmatic handling.
        details (Dict[str, Any]): Additional context about the error.
    """

    default_message = "An unexpected error occurred"
    default_code = "FRAMEWORK_ERROR"

    def __init__(
        self,
        message: str = "",
        code: Optional[str] = None,
        details: Optional[Dict[str, Any]] = None,
    ):
        self.message = message or self.default_message
        self.code = code or self.default_code
        self.details = details or {}
        super().__init__(self.message)

    def __str__(self) -> str:
        return f"[{self.code}] {self.message}"

    def to_dict(self) -> Dict[str, Any]:
        """Convert the exception to a dictionary."""
        return {"code": self.code, "message": self.message, "details": self.details}


class ValidationException(FrameworkException):
    """
    Exception raised for invalid arguments.

    This includes:
    - Out-of-range call arguments
    - Values violating a documented domain type invariant
    """

    default_message = "A validation error occurred"
    default_code = "VALIDATION_ERROR"


class ContractError(ValidationException):
    """
    Exception raised when a caller breaks an operation's precondition.

    This includes:
    - backward() on a non-scalar tensor
    - Missing adjacency blocks or gradients
    - Per-task collections whose keys do not line up
    """

    default_message = "Operation contract violated"
    default_code = "CONTRACT_ERROR"


class ConfigurationException(FrameworkException):
    """
    Exception raised for invalid configuration values.

    This includes:
    - Thresholds, mass parameters and weights outside their ranges
    - Architectural settings that cannot be realised (e.g. H not dividing d_out)
    - Empty search stages
    """

    default_message = "Invalid configuration"
    default_code = "CONFIG_ERROR"

    def __init__(
        self,
        message: str = "",
        code: Optional[str] = None,
        details: Optional[Dict[str, Any]] = None,
        key: Optional[str] = None,
    ):
        details = details or {}
        if key:
            details["key"] = key
        super().__init__(message=message, code=code, details=details)
