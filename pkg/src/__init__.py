"""CT-GNN multi-task classification toolkit sources."""

__all__ = []
