"""Task executors."""

from .process_executor import ProcessExecutor  # noqa: F401

__all__ = ["ProcessExecutor"]
