import atexit
import logging
import multiprocessing
import os
from concurrent.futures import Executor, ProcessPoolExecutor, ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

from config import get_settings

T = TypeVar("T")
R = TypeVar("R")

# (pid, max_workers) -> pool; forked children never reuse the parent's pools
_executors: dict[tuple[int, int], Executor] = {}


def worker_count() -> int:
    return get_settings().threads


def make_executor(max_workers: int | None = None) -> Executor:
    """
    Process pool on the fork context so module-level state is inherited;
    threads when fork is unavailable.
    """
    try:
        ctx = multiprocessing.get_context("fork")
        return ProcessPoolExecutor(max_workers=max_workers, mp_context=ctx)
    except ValueError as e:
        logging.debug(f"Fork context unavailable ({e}); using threads")
        return ThreadPoolExecutor(max_workers=max_workers)


def shared_executor(max_workers: int) -> Executor:
    """One pool per worker count, kept until shutdown_executors()."""
    key = (os.getpid(), max_workers)
    executor = _executors.get(key)
    if executor is None:
        executor = _executors[key] = make_executor(max_workers)
        logging.debug(f"Started shared pool with {max_workers} workers")
    return executor


def shutdown_executors() -> None:
    pid = os.getpid()
    for key in [k for k in _executors if k[0] == pid]:
        _executors.pop(key).shutdown()


atexit.register(shutdown_executors)


def parallel_map(fn: Callable[[T], R], items: Iterable[T], max_workers: int | None = None) -> list[R]:
    """Map fn over items, results in input order regardless of worker count."""
    items = list(items)
    workers = max_workers or worker_count()
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    return list(shared_executor(workers).map(fn, items))
