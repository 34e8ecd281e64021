"""Process-pool helpers for partitioned sums."""
from __future__ import annotations

import logging
import multiprocessing
from functools import partial
from typing import Callable, Iterable, Sequence

logger = logging.getLogger(__name__)


def partitioned_map(func: Callable, partitions: Sequence, threads: int = 1,
                    **kwargs) -> list:
    """``[func(part, **kwargs) for part in partitions]``, optionally in a pool.

    Results come back in partition order, so exact reductions over them are
    independent of the worker count.
    """
    worker = partial(func, **kwargs) if kwargs else func
    if threads <= 1 or len(partitions) <= 1:
        return [worker(p) for p in partitions]
    processes = min(threads, len(partitions))
    logger.debug('mapping %d partitions over %d processes',
                 len(partitions), processes)
    with multiprocessing.Pool(processes=processes) as pool:
        return pool.map(worker, partitions)


def exact_sum(values: Iterable, start):
    total = start
    for v in values:
        total = total + v
    return total
