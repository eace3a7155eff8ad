"""Numerics, cross-task graphs, GNN layers, models, objectives, metrics and data."""

__all__ = []
