"""
CT-GNN configuration providers.

Loads raw configuration dictionaries from JSON/YAML files and from prefixed
environment variables.
"""

import json
import os
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Dict, Optional, Union

try:
    import yaml
except ImportError:
    yaml = None

from loguru import logger

from ..exceptions import ConfigurationException, DataParseException
from .constants import ENV_PREFIX, ENV_SEPARATOR


class ConfigProvider(ABC):
    """Abstract base class for configuration providers."""

    @abstractmethod
    def load(self, source: Optional[Union[str, Path]] = None) -> Dict[str, Any]:
        """Load configuration from source."""


class FileProvider(ConfigProvider):
    """Provider for file-based configurations."""

    def __init__(self):
        self._loaders = {
            ".json": self._load_json,
            ".yaml": self._load_yaml,
            ".yml": self._load_yaml,
        }

    def supports(self, source: Union[str, Path]) -> bool:
        return Path(source).suffix.lower() in self._loaders

    def load(self, source: Optional[Union[str, Path]] = None) -> Dict[str, Any]:
        """Load configuration from file; missing or malformed files raise."""
        if source is None:
            return {}
        path = Path(source)
        if not path.exists():
            raise ConfigurationException(
                f"Configuration file not found: {path}", details={"path": str(path)}
            )
        loader = self._loaders.get(path.suffix.lower())
        if loader is None:
            raise ConfigurationException(
                f"Unsupported configuration format: {path.suffix}",
                details={"path": str(path)},
            )
        content = loader(path)
        if not isinstance(content, dict):
            raise ConfigurationException(
                f"Configuration root must be an object: {path}", details={"path": str(path)}
            )
        logger.bind(logger_name=__name__).debug(f"Loaded configuration from {path}")
        return content

    def _load_yaml(self, path: Path) -> Any:
        if not yaml:
            raise ConfigurationException("PyYAML is required for YAML configuration files")
        with open(path, "r", encoding="utf-8") as f:
            return yaml.safe_load(f) or {}

    def _load_json(self, path: Path) -> Any:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
        try:
            return json.loads(text)
        except json.JSONDecodeError as e:
            raise DataParseException(
                f"Malformed JSON: {e.msg}", path=str(path), line=e.lineno, column=e.colno
            ) from e


class EnvironmentProvider(ConfigProvider):
    """Provider for environment variable configurations.

    ``CTGNN_TRAINING__EPOCHS=5`` becomes ``{"training": {"epochs": 5}}``.
    """

    def __init__(self, prefix: str = ENV_PREFIX, separator: str = ENV_SEPARATOR):
        self.prefix = prefix.upper()
        self.separator = separator

    def load(self, source: Optional[Union[str, Path]] = None) -> Dict[str, Any]:
        env_config: Dict[str, Any] = {}
        for key, value in os.environ.items():
            if not key.startswith(self.prefix):
                continue
            config_key = key[len(self.prefix):].lower()
            if self.separator not in config_key:
                # flat CTGNN_* variables (e.g. CTGNN_ENV) are not config keys
                continue
            self._set_nested_value(env_config, config_key.split(self.separator), self._parse(value))
        return env_config

    @staticmethod
    def _parse(value: str) -> Any:
        try:
            return json.loads(value)
        except json.JSONDecodeError:
            if value.lower() in ("true", "false"):
                return value.lower() == "true"
            return value

    @staticmethod
    def _set_nested_value(target: Dict[str, Any], keys: list, value: Any) -> None:
        for k in keys[:-1]:
            target = target.setdefault(k, {})
        target[keys[-1]] = value


def deep_merge(base: Dict[str, Any], overlay: Dict[str, Any]) -> Dict[str, Any]:
    """Recursively merge ``overlay`` into a copy of ``base``."""
    merged = dict(base)
    for key, value in overlay.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged
