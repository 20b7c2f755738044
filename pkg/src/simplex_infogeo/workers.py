from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

import numpy as np

from .config import Settings, get_settings

T = TypeVar("T")
R = TypeVar("R")

LOG_CONFIGURED = False


def configure_logging(name: str, level: str | None = None) -> None:
    global LOG_CONFIGURED
    if LOG_CONFIGURED:
        return
    settings = get_settings()
    log_level = (level or settings.log_level).upper()
    formatter = logging.Formatter("%(asctime)s %(levelname)s [%(name)s] %(message)s")
    handlers: list[logging.Handler] = []

    if settings.log_dir:
        path = os.path.abspath(settings.log_dir)
        os.makedirs(path, exist_ok=True)
        file_handler = logging.FileHandler(os.path.join(path, f"{name}.log"))
        file_handler.setFormatter(formatter)
        handlers.append(file_handler)

    stream_handler = logging.StreamHandler()
    stream_handler.setFormatter(formatter)
    handlers.append(stream_handler)

    logging.basicConfig(level=log_level, handlers=handlers, force=True)
    LOG_CONFIGURED = True


def resolve_thread_count(settings: Settings | None = None, override: int | None = None) -> int:
    requested = override if override is not None else (settings or get_settings()).threads
    if requested <= 0:
        return os.cpu_count() or 1
    return requested


def pair_indices(n: int, symmetric: bool) -> list[tuple[int, int]]:
    if symmetric:
        return [(i, j) for i in range(n) for j in range(i + 1, n)]
    return [(i, j) for i in range(n) for j in range(n) if i != j]


def run_pairwise(
    n: int,
    fn: Callable[[int, int], float],
    *,
    symmetric: bool,
    threads: int = 1,
) -> np.ndarray:
    """Fill an n×n matrix with fn(i, j); the diagonal stays zero.

    Symmetric measures are evaluated once per unordered pair and mirrored.
    Every value lands in its own slot, so completion order never matters.
    """
    out = np.zeros((n, n), dtype=float)
    pairs = pair_indices(n, symmetric)
    if not pairs:
        return out

    def _task(pair: tuple[int, int]) -> None:
        i, j = pair
        value = fn(i, j)
        out[i, j] = value
        if symmetric:
            out[j, i] = value

    if threads <= 1:
        for pair in pairs:
            _task(pair)
        return out

    with ThreadPoolExecutor(max_workers=threads) as pool:
        # list() re-raises the first worker exception
        list(pool.map(_task, pairs))
    return out


def map_shards(fn: Callable[[T], R], shards: Sequence[T], *, threads: int = 1) -> list[R]:
    """Apply fn to every shard; results come back in shard order."""
    if threads <= 1 or len(shards) <= 1:
        return [fn(shard) for shard in shards]
    with ThreadPoolExecutor(max_workers=min(threads, len(shards))) as pool:
        return list(pool.map(fn, shards))
