"""
CT-GNN configuration manager.

Layers file configuration, the ``CTGNN_`` environment overlay and explicit
overrides (in that order, later wins) and validates the result.
"""

import json
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Type, TypeVar, Union

from loguru import logger
from pydantic import BaseModel, ValidationError

from ..exceptions import ConfigurationException
from .models import RunConfig
from .providers import EnvironmentProvider, FileProvider, deep_merge

M = TypeVar("M", bound=BaseModel)

_log = logger.bind(logger_name=__name__)


def nest_overrides(overrides: Mapping[str, Any]) -> Dict[str, Any]:
    """Turn ``{"training.epochs": 5}`` into ``{"training": {"epochs": 5}}``; ``None`` values are dropped."""
    nested: Dict[str, Any] = {}
    for dotted, value in overrides.items():
        if value is None:
            continue
        keys = dotted.split(".")
        target = nested
        for k in keys[:-1]:
            target = target.setdefault(k, {})
        target[keys[-1]] = value
    return nested


def validate_config(model_cls: Type[M], raw: Dict[str, Any], source: str = "<config>") -> M:
    """Validate ``raw`` against ``model_cls``, mapping pydantic errors to ConfigurationException."""
    try:
        return model_cls.model_validate(raw)
    except ValidationError as e:
        first = e.errors()[0]
        location = ".".join(str(part) for part in first["loc"]) or "<root>"
        raise ConfigurationException(
            f"Invalid {model_cls.__name__} in {source}: {location}: {first['msg']}",
            key=location,
            details={"errors": [
                {"loc": ".".join(str(p) for p in err["loc"]), "msg": err["msg"]}
                for err in e.errors()
            ]},
        ) from e


def load_config_model(model_cls: Type[M], path: Union[str, Path]) -> M:
    """Load a standalone configuration block (synthetic spec, search space)."""
    raw = FileProvider().load(path)
    return validate_config(model_cls, raw, source=str(path))


def load_run_config(
    path: Optional[Union[str, Path]] = None,
    overrides: Optional[Mapping[str, Any]] = None,
    use_env: bool = True,
) -> RunConfig:
    """
    Build a RunConfig from file, environment and flag overrides.

    Args:
        path: JSON/YAML run config; defaults only when omitted
        overrides: dotted-key overrides (flags win over file and environment)
        use_env: apply the ``CTGNN_`` environment overlay

    Returns:
        RunConfig with relative data paths anchored at the config directory
    """
    raw = FileProvider().load(path) if path else {}
    if use_env:
        env = EnvironmentProvider().load()
        if env:
            _log.debug(f"Applying environment overlay for sections {sorted(env)}")
            raw = deep_merge(raw, env)
    if overrides:
        raw = deep_merge(raw, nest_overrides(overrides))

    config = validate_config(RunConfig, raw, source=str(path) if path else "<defaults>")
    base_dir = Path(path).resolve().parent if path else Path.cwd()
    return config.resolve_paths(base_dir)


def save_config(config: BaseModel, path: Union[str, Path]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(config.model_dump(mode="json", by_alias=True), f, indent=2)
