"""Order-preserving parallel map capped by the SOBEX_THREADS variable."""

import os
from concurrent.futures import ThreadPoolExecutor


def worker_count():
    try:
        n = int(os.environ.get("SOBEX_THREADS", "1"))
    except ValueError:
        n = 1
    return max(1, min(n, os.cpu_count() or 1))


def pmap(fn, items):
    items = list(items)
    n = worker_count()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))
