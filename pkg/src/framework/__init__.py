"""Shared framework pieces: logging, exceptions and configuration."""

__all__ = []
