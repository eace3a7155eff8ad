"""Custom exception types for the CT-GNN toolkit."""

from .base import (
    ConfigurationException,
    ContractError,
    FrameworkException,
    ValidationException,
)
from .compute import ComputeException, DimensionError, DomainError, NumericFailureError
from .data import (
    DataException,
    DataParseException,
    DataValidationException,
    SchemaMismatchError,
)

__all__ = [
    "FrameworkException",
    "ValidationException",
    "ContractError",
    "ConfigurationException",
    "DataException",
    "DataValidationException",
    "DataParseException",
    "SchemaMismatchError",
    "ComputeException",
    "DimensionError",
    "DomainError",
    "NumericFailureError",
]
