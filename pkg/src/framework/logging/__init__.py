"""
Framework Logging Package.

loguru-backed logging for the toolkit:
- Console output (plain or JSON serialized)
- Optional rotating file and performance sinks
- Environment presets overridable through ``LOG_*`` variables
"""

from typing import Any, Dict, Optional, Union

from loguru import logger

from .setup import (
    DEFAULT_LOG_FORMAT,
    DEFAULT_LOG_LEVEL,
    ENVIRONMENT_CONFIGS,
    LogConfig,
    PerformanceLogger,
    configure_logging,
    get_logger,
    log_performance_context,
)

_current_config: Optional[LogConfig] = None


def setup_logging(
    config: Optional[Union[LogConfig, Dict[str, Any]]] = None,
    environment: Optional[str] = None,
) -> LogConfig:
    """
    Setup logging for the application, replacing any previous sinks.

    Args:
        config: Logging configuration (LogConfig or dict)
        environment: Environment name ('development', 'testing', 'production')

    Returns:
        LogConfig: The configuration that was applied
    """
    global _current_config
    _current_config = configure_logging(config=config, environment=environment)
    return _current_config


def get_current_config() -> Optional[LogConfig]:
    """Get the current logging configuration."""
    return _current_config


__all__ = [
    "DEFAULT_LOG_FORMAT",
    "DEFAULT_LOG_LEVEL",
    "ENVIRONMENT_CONFIGS",
    "LogConfig",
    "PerformanceLogger",
    "configure_logging",
    "get_current_config",
    "get_logger",
    "log_performance_context",
    "logger",
    "setup_logging",
]
