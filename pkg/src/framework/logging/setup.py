"""
Logging Setup and Configuration Module.

Configures loguru sinks for the toolkit: a console sink (plain or JSON
serialized), an optional rotating file sink and a performance sink fed by
``log_performance_context``. Environment presets pick sensible defaults and
environment variables override them.
"""

import os
import sys
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Dict, Iterator, Optional, Union

from loguru import logger

DEFAULT_LOG_LEVEL = "INFO"
DEFAULT_LOG_FORMAT = (
    "<green>{time:YYYY-MM-DD HH:mm:ss.SSS}</green> | <level>{level: <8}</level> | "
    "<cyan>{extra[logger_name]}</cyan> - <level>{message}</level>"
)
DEFAULT_LOG_DIR = "logs"
DEFAULT_ROTATION = "10 MB"
DEFAULT_RETENTION = "14 days"

ENVIRONMENT_CONFIGS: Dict[str, Dict[str, Any]] = {
    "development": {
        "level": "INFO",
        "console": True,
        "file": False,
        "structured": False,
        "colorize": True,
    },
    "testing": {
        "level": "WARNING",
        "console": True,
        "file": False,
        "structured": False,
        "colorize": False,
    },
    "production": {
        "level": "INFO",
        "console": True,
        "file": True,
        "structured": True,
        "colorize": False,
    },
}

_TRUTHY = ("true", "1", "yes", "on")


@dataclass
class LogConfig:
    """Configuration for logging setup."""

    level: str = DEFAULT_LOG_LEVEL
    console: bool = True
    file: bool = False
    structured: bool = False
    colorize: bool = True
    log_dir: str = DEFAULT_LOG_DIR
    rotation: str = DEFAULT_ROTATION
    retention: str = DEFAULT_RETENTION
    format_string: Optional[str] = None
    performance: bool = False

    def __post_init__(self) -> None:
        valid_levels = ["TRACE", "DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR", "CRITICAL"]
        self.level = self.level.upper()
        if self.level not in valid_levels:
            raise ValueError(f"Invalid log level: {self.level}. Must be one of {valid_levels}")


def _with_default_name(record: Dict[str, Any]) -> bool:
    record["extra"].setdefault("logger_name", record["name"])
    return True


def setup_console_logging(config: LogConfig) -> None:
    """Setup console logging handler (stderr, so stdout stays clean for results)."""
    if not config.console:
        return
    if config.structured:
        logger.add(sys.stderr, level=config.level, serialize=True, filter=_with_default_name)
    else:
        logger.add(
            sys.stderr,
            level=config.level,
            format=config.format_string or DEFAULT_LOG_FORMAT,
            colorize=config.colorize,
            filter=_with_default_name,
        )


def setup_file_logging(config: LogConfig) -> None:
    """Setup rotating file handlers."""
    if not config.file:
        return
    log_dir = Path(config.log_dir)
    log_dir.mkdir(parents=True, exist_ok=True)
    logger.add(
        str(log_dir / "ctgnn.log"),
        level=config.level,
        format=config.format_string or DEFAULT_LOG_FORMAT,
        serialize=config.structured,
        rotation=config.rotation,
        retention=config.retention,
        filter=_with_default_name,
    )


def setup_performance_logging(config: LogConfig) -> None:
    """Route records flagged ``performance=True`` to their own JSON file."""
    if not config.performance:
        return
    log_dir = Path(config.log_dir)
    log_dir.mkdir(parents=True, exist_ok=True)
    logger.add(
        str(log_dir / "performance.log"),
        level="INFO",
        serialize=True,
        rotation=config.rotation,
        retention=config.retention,
        filter=lambda record: bool(record["extra"].get("performance")),
    )


def configure_logging(
    config: Optional[Union[LogConfig, Dict[str, Any]]] = None,
    environment: Optional[str] = None,
) -> LogConfig:
    """
    Configure logging based on configuration and environment.

    Args:
        config: Logging configuration (LogConfig or dict of LogConfig fields)
        environment: Environment preset name; defaults to ``CTGNN_ENV``

    Returns:
        LogConfig: The final configuration used
    """
    logger.remove()

    if environment is None:
        environment = os.getenv("CTGNN_ENV", "development").lower()
    env_config = ENVIRONMENT_CONFIGS.get(environment, ENVIRONMENT_CONFIGS["development"])

    if config is None:
        final_config = LogConfig(**env_config)
    elif isinstance(config, dict):
        final_config = LogConfig(**{**env_config, **config})
    else:
        final_config = config

    final_config.level = os.getenv("LOG_LEVEL", final_config.level).upper()
    final_config.log_dir = os.getenv("LOG_DIR", final_config.log_dir)
    if os.getenv("LOG_JSON"):
        final_config.structured = os.getenv("LOG_JSON", "").lower() in _TRUTHY
    if os.getenv("LOG_FILE"):
        final_config.file = os.getenv("LOG_FILE", "").lower() in _TRUTHY

    setup_console_logging(final_config)
    setup_file_logging(final_config)
    setup_performance_logging(final_config)

    logger.bind(logger_name=__name__, log_config=asdict(final_config)).debug(
        f"Logging configured for {environment} environment"
    )
    return final_config


class PerformanceLogger:
    """Performance logging utilities."""

    @staticmethod
    def log_execution_time(operation: str, execution_time: float, **extra: Any) -> None:
        """Log the wall-clock time of an operation."""
        logger.bind(
            logger_name="performance",
            performance=True,
            operation=operation,
            execution_time_s=execution_time,
            **extra,
        ).info(f"{operation} finished in {execution_time:.3f}s")


@contextmanager
def log_performance_context(operation_name: str, **extra: Any) -> Iterator[None]:
    """Context manager for performance logging."""
    start_time = time.perf_counter()
    try:
        yield
    finally:
        PerformanceLogger.log_execution_time(
            operation_name, time.perf_counter() - start_time, **extra
        )


def get_logger(name: Optional[str] = None):
    """
    Get a logger bound to ``name``.

    Args:
        name: Logger name (defaults to calling module)
    """
    if name is None:
        import inspect

        frame = inspect.currentframe().f_back  # type: ignore[union-attr]
        name = frame.f_globals.get("__name__", "unknown")  # type: ignore[union-attr]
    return logger.bind(logger_name=name)


_default_config_applied = False


def apply_default_config() -> None:
    """Apply default logging configuration if none has been applied."""
    global _default_config_applied
    if not _default_config_applied:
        configure_logging()
        _default_config_applied = True


apply_default_config()
