"""
Worker pool for independent experiment cells.

Library code receives a map-like callable `mapper(func, items)`; results always come back in item order,
so every table is identical for any worker count.
"""

from __future__ import annotations

import logging
import os
from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from typing import TypeVar

from horocover.errors import ConfigError

from .config import THREADS_ENV

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def resolve_threads(flag: int | None, configured: int = 1) -> int:
    """
    Worker count: the --threads flag, then the HOROCOVER_THREADS environment variable, then the config.

    Raises:
        ConfigError: If the chosen value is not a positive integer
    """
    if flag is not None:
        source, value = "--threads", flag
    elif os.environ.get(THREADS_ENV):
        source, raw = THREADS_ENV, os.environ[THREADS_ENV]
        try:
            value = int(raw)
        except ValueError as e:
            raise ConfigError(f"{THREADS_ENV} must be a positive integer, got '{raw}'") from e
    else:
        source, value = "config key 'threads'", configured
    if value < 1:
        raise ConfigError(f"Thread count from {source} must be at least 1, got {value}")
    return value


def parallel_map(func: Callable[[T], R], items: Sequence[T], threads: int = 1) -> list[R]:
    """
    Apply `func` to every item, in a process pool when threads > 1.

    `func` and the items must be picklable for threads > 1 (module-level functions, partials of them).

    Returns:
        Results in item order
    """
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    workers = min(threads, len(items))
    logger.debug(f"Mapping {len(items)} cells over {workers} workers")
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, items))


def make_mapper(threads: int) -> Callable[[Callable, Sequence], list]:
    """Map-like callable bound to a worker count."""
    return partial(parallel_map, threads=threads)
