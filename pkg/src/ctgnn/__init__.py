"""Marker package so the ``ctgnn`` console script resolves under the flat src/ layout.

The runtime modules live at top level (``main.py``, ``domain/``, ``tasks/``).
"""

from main import main, run  # noqa: F401

__all__ = ["main", "run"]
