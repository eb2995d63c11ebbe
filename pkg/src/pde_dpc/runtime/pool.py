"""Bounded asyncio worker pool over blocking numerical work."""

import asyncio
from collections.abc import Callable, Sequence


async def map_in_threads[T, R](
    func: Callable[[T], R], items: Sequence[T], threads: int = 1
) -> list[R]:
    """Apply ``func`` to every item with at most ``threads`` calls in flight.

    Results come back in submission order regardless of completion order.
    """
    if threads <= 0:
        raise ValueError("threads must be a positive integer")
    semaphore = asyncio.Semaphore(threads)

    async def run(item: T) -> R:
        async with semaphore:
            return await asyncio.to_thread(func, item)

    return list(await asyncio.gather(*(run(item) for item in items)))


def run_pool[T, R](func: Callable[[T], R], items: Sequence[T], threads: int = 1) -> list[R]:
    """Synchronous entry point; with one thread work runs inline in order."""
    if threads == 1:
        return [func(item) for item in items]
    return asyncio.run(map_in_threads(func, items, threads))
