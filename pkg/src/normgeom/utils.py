import os
import sys
import time
import logging
import concurrent.futures
from collections import deque
from collections.abc import Callable, Iterable
from typing import TypeVar

logger = logging.getLogger(__name__)

_CAPTURE_HANDLER = None

T = TypeVar("T")
R = TypeVar("R")


class LogCaptureHandler(logging.Handler):
    """
    Handler that stores the last N warning and error records in memory.
    Progress lines are throttled by wall time and lines carry no timestamps, so two
    identical runs leave identical tails.
    """

    def __init__(self, capacity: int = 50, level: int = logging.WARNING):
        super().__init__(level)
        self.buffer = deque(maxlen=capacity)
        self.setFormatter(logging.Formatter("[%(levelname)s] %(name)s: %(message)s"))

    def emit(self, record):
        try:
            msg = self.format(record)
            self.buffer.append(msg)
        except Exception:
            self.handleError(record)


class LogThrottler:
    """
    Prevents log flooding by enforcing a minimum interval between logs.
    """

    def __init__(self, interval_sec: float):
        """
        :param interval_sec: Minimum seconds between logs.
        """
        self.interval = interval_sec
        self.last_log_time = 0.0

    def should_log(self) -> bool:
        """
        Check if we are allowed to log now.
        :return: True if enough time has passed.
        """
        now = time.monotonic()
        if now - self.last_log_time > self.interval:
            self.last_log_time = now
            return True
        return False


def resolve_threads(threads: int | None) -> int:
    """Worker count for sweeps: explicit value, else machine parallelism."""
    if threads is not None:
        return max(1, threads)
    return os.cpu_count() or 1


def ordered_map(fn: Callable[[T], R], items: Iterable[T], threads: int | None = None) -> list[R]:
    """
    Apply `fn` to every item, possibly on a thread pool.
    Results come back in input order, so reductions over them are deterministic
    regardless of the worker count.

    :param fn: Pure function of one item.
    :param items: Work items.
    :param threads: Worker threads (None = machine parallelism, 1 = inline).
    :return: List of results aligned with `items`.
    """
    items = list(items)
    workers = min(resolve_threads(threads), max(1, len(items)))
    if workers == 1:
        return [fn(item) for item in items]
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, items))


def setup_logging(level: int = logging.INFO) -> None:
    """
    Configure standard logging format.
    Records go to stderr; stdout is reserved for JSON reports.
    :param level: Logging verbosity (default INFO).
    """
    global _CAPTURE_HANDLER
    logging.basicConfig(
        level=level,
        format="%(asctime)s [%(levelname)s] %(message)s",
        datefmt="%H:%M:%S",
        stream=sys.stderr,
        force=True,
    )

    # Attach capture handler to root logger
    root = logging.getLogger()
    if _CAPTURE_HANDLER is None:
        _CAPTURE_HANDLER = LogCaptureHandler()
    if _CAPTURE_HANDLER not in root.handlers:
        root.addHandler(_CAPTURE_HANDLER)
    # One tail per run
    _CAPTURE_HANDLER.buffer.clear()


def get_captured_logs() -> str:
    """Retrieve recent warnings and errors from the capture buffer."""
    if _CAPTURE_HANDLER:
        return "\n".join(_CAPTURE_HANDLER.buffer)
    return "No logs captured."
