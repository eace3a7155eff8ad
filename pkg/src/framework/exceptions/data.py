from typing import Any, Dict, Optional

from .base import FrameworkException


class DataException(FrameworkException):
    """
    Base exception class for data-related errors.

    This includes:
    - Dataset and graph file errors
    - Label validation errors
    - Schema disagreements between artifacts
    """

    default_message = "A data error occurred"
    default_code = "DATA_ERROR"


class DataValidationException(DataException):
    """
    Exception raised for records or targets that violate the task schema.

    The offending record id, file line and field are stored in ``details``
    whenever they are known.
    """

    default_message = "Data validation error"
    default_code = "DATA_VALIDATION_ERROR"

    def __init__(
        self,
        message: Optional[str] = None,
        code: Optional[str] = None,
        details: Optional[Dict[str, Any]] = None,
        record_id: Optional[str] = None,
        line: Optional[int] = None,
        field: Optional[str] = None,
    ):
        details = details or {}
        if record_id is not None:
            details["record_id"] = record_id
        if line is not None:
            details["line"] = line
        if field is not None:
            details["field"] = field

        location = []
        if line is not None:
            location.append(f"line {line}")
        if field is not None:
            location.append(f"field '{field}'")
        if record_id is not None:
            location.append(f"record '{record_id}'")
        message = message or self.default_message
        if location:
            message = f"{message} ({', '.join(location)})"

        super().__init__(message=message, code=code, details=details)


class DataParseException(DataException):
    """
    Exception raised for files that cannot be parsed.

    This includes:
    - Malformed JSON / JSON Lines
    - Missing or mistyped fields in a structured artifact
    """

    default_message = "Could not parse data file"
    default_code = "DATA_PARSE_ERROR"

    def __init__(
        self,
        message: Optional[str] = None,
        code: Optional[str] = None,
        details: Optional[Dict[str, Any]] = None,
        path: Optional[str] = None,
        line: Optional[int] = None,
        column: Optional[int] = None,
        field: Optional[str] = None,
    ):
        details = details or {}
        context = []
        if path is not None:
            details["path"] = str(path)
            context.append(str(path))
        if line is not None:
            details["line"] = line
            context.append(f"line {line}" + (f", column {column}" if column else ""))
        if column is not None:
            details["column"] = column
        if field is not None:
            details["field"] = field
            context.append(f"field '{field}'")

        message = message or self.default_message
        if context:
            message = f"{message} ({'; '.join(context)})"
        super().__init__(message=message, code=code, details=details)


class SchemaMismatchError(DataException):
    """Exception raised when two artifacts disagree about the task schema."""

    default_message = "Schema mismatch"
    default_code = "SCHEMA_MISMATCH"

    def __init__(
        self,
        message: Optional[str] = None,
        code: Optional[str] = None,
        details: Optional[Dict[str, Any]] = None,
        expected: Any = None,
        actual: Any = None,
    ):
        details = details or {}
        if expected is not None:
            details["expected"] = expected
        if actual is not None:
            details["actual"] = actual
        super().__init__(message=message or "", code=code, details=details)
