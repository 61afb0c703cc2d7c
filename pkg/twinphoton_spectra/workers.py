import concurrent.futures
import os
from typing import Callable, Iterable, List, Optional, TypeVar

T = TypeVar("T")
R = TypeVar("R")

THREADS_ENV = "TWINPHOTON_THREADS"
MAX_WORKERS = 16


def _physical_cores() -> int:
    try:
        import psutil
        cores = psutil.cpu_count(logical=False) or psutil.cpu_count(logical=True)
        return int(cores or 1)
    except Exception:
        return os.cpu_count() or 1


def worker_count(requested: Optional[int] = None) -> int:
    """Threads for grid evaluation: explicit request, then env override, then cores."""
    if requested is None:
        env = os.environ.get(THREADS_ENV, "").strip()
        if env:
            try:
                requested = int(env)
            except ValueError:
                requested = None
    if requested is None:
        requested = _physical_cores()
    return max(1, min(MAX_WORKERS, int(requested)))


def ordered_map(fn: Callable[[T], R], items: Iterable[T], workers: Optional[int] = None) -> List[R]:
    """Apply fn to every item on a thread pool; results keep input order."""
    items = list(items)
    if not items:
        return []
    n = min(worker_count(workers), len(items))
    if n == 1:
        return [fn(item) for item in items]
    with concurrent.futures.ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))
