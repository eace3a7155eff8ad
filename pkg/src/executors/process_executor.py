"""Process-based executor for independent jobs such as search trials."""

from concurrent.futures import Future, ProcessPoolExecutor
from typing import Any, Callable, Dict, Mapping, Optional, Sequence

from framework.logging import get_logger

logger = get_logger("executors.process")


class ProcessExecutor:
    """
    Thin wrapper over a process pool.

    ``run_keyed`` submits one job per key and returns the results keyed the
    same way, so the outcome does not depend on completion order.
    """

    def __init__(self, max_workers: Optional[int] = None):
        self.max_workers = max_workers
        self._pool: Optional[ProcessPoolExecutor] = None

    def _ensure_pool(self) -> ProcessPoolExecutor:
        if self._pool is None:
            self._pool = ProcessPoolExecutor(max_workers=self.max_workers)
        return self._pool

    def submit(self, fn: Callable[..., Any], *args: Any, **kwargs: Any) -> Future:
        return self._ensure_pool().submit(fn, *args, **kwargs)

    def run_keyed(self, fn: Callable[..., Any], jobs: Mapping[str, Sequence[Any]]) -> Dict[str, Any]:
        futures = {key: self.submit(fn, *args) for key, args in jobs.items()}
        logger.debug(f"Submitted {len(futures)} jobs to the process pool")
        return {key: future.result() for key, future in futures.items()}

    def shutdown(self) -> None:
        if self._pool is not None:
            self._pool.shutdown(wait=True)
            self._pool = None

    def __enter__(self) -> "ProcessExecutor":
        return self

    def __exit__(self, *exc: Any) -> None:
        self.shutdown()


__all__ = ["ProcessExecutor"]
