"""Water level label discretization."""

from typing import Any

from framework.config.constants import WATER_LEVELS
from framework.exceptions import DataValidationException, ValidationException

# percent -> bin: [0,5) [5,15) [15,30) [30,100]
_BINS = {0: 0, 10: 1, 20: 2}


def discretize_water(level_percent: Any) -> int:
    if isinstance(level_percent, bool) or level_percent not in WATER_LEVELS:
        raise DataValidationException(
            f"Water level must be one of {list(WATER_LEVELS)}, got {level_percent!r}",
            field="water_level",
        )
    return _BINS.get(int(level_percent), 3)


def water_level_class(level_percent: Any, scheme: str = "binned") -> int:
    """Class index of a water level under the ``binned`` (4 classes) or ``raw`` (11 classes) scheme."""
    if scheme == "binned":
        return discretize_water(level_percent)
    if scheme == "raw":
        discretize_water(level_percent)
        return int(level_percent) // 10
    raise ValidationException(f"Unknown water scheme: {scheme}", details={"scheme": scheme})
