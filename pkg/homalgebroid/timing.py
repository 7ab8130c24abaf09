"""Wall-clock timings for verification runs."""

import functools
import logging
import threading
import time
from typing import Any, Callable, Dict, List

logger = logging.getLogger(__name__)


class CheckTimings:
    """Collect elapsed seconds per check name."""

    def __init__(self):
        self.elapsed: Dict[str, List[float]] = {}
        self.lock = threading.Lock()

    def record(self, name: str, seconds: float) -> None:
        """Record one run of ``name``."""
        with self.lock:
            self.elapsed.setdefault(name, []).append(seconds)

    def measure(self, name: str):
        """Context manager recording the time spent in its body."""
        timings = self

        class _Measure:
            def __enter__(self):
                self.start = time.perf_counter()
                return self

            def __exit__(self, *exc):
                timings.record(name, time.perf_counter() - self.start)
                return False

        return _Measure()

    def total(self) -> float:
        with self.lock:
            return sum(sum(values) for values in self.elapsed.values())

    def summary(self) -> Dict[str, float]:
        """Total seconds per check, in recording order."""
        with self.lock:
            return {name: sum(values) for name, values in self.elapsed.items()}

    def reset(self) -> None:
        with self.lock:
            self.elapsed.clear()


def timer(func: Callable) -> Callable:
    """Decorator logging the execution time of ``func`` at DEBUG level."""
    @functools.wraps(func)
    def wrapper(*args, **kwargs) -> Any:
        start_time = time.perf_counter()
        result = func(*args, **kwargs)
        elapsed = time.perf_counter() - start_time
        logger.debug(f"{func.__name__} took {elapsed:.3f} seconds")
        return result

    return wrapper
