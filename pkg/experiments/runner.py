"""Fan independent trials out to worker threads; results come back in task order."""

import logging
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

from config import WORKERS

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def run_ordered(func: Callable[[T], R], tasks: Sequence[T], workers: int = WORKERS) -> list[R]:
    """map(func, tasks) on a thread pool; each task owns its seed stream, so order of completion is irrelevant."""
    tasks = list(tasks)
    if workers <= 1 or len(tasks) <= 1:
        return [func(task) for task in tasks]
    logger.debug(f"Running {len(tasks)} tasks on {workers} threads")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, tasks))
