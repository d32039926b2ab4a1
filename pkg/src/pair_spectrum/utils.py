"""Helpers built on top of trio: concurrent evaluation of independent samples
and asynchronous output files.
"""

from pathlib import Path
from typing import Any, Callable, Iterable, List, Optional, TypeVar, Union

from trio import CapacityLimiter, open_file, open_nursery, to_thread

__all__ = ("map_concurrently", "write_text_async")

T = TypeVar("T")
R = TypeVar("R")


async def map_concurrently(
    func: Callable[[T], R], items: Iterable[T], max_workers: Optional[int] = None
) -> List[R]:
    """Evaluates a function on each item in worker threads and returns the
    results in the order of the items.

    Parameters:
        func: the function to evaluate; it must be thread-safe
        items: the arguments to evaluate the function on
        max_workers: maximum number of worker threads running at the same
            time; `None` means to use trio's default thread limiter

    Raises:
        the exception raised by the first item (in item order) that failed
    """
    items = list(items)
    results: List[Any] = [None] * len(items)
    errors: List[Optional[BaseException]] = [None] * len(items)
    limiter = CapacityLimiter(max_workers) if max_workers else None

    async def evaluate(index: int, item: T) -> None:
        try:
            results[index] = await to_thread.run_sync(func, item, limiter=limiter)
        except Exception as ex:
            errors[index] = ex

    async with open_nursery() as nursery:
        for index, item in enumerate(items):
            nursery.start_soon(evaluate, index, item)

    for error in errors:
        if error is not None:
            raise error

    return results


async def write_text_async(dest: Union[str, Path], text: str) -> None:
    """Writes the given text to a file asynchronously, using UTF-8 encoding and
    leaving line endings untouched.
    """
    async with await open_file(dest, mode="w", encoding="utf-8", newline="") as fp:
        await fp.write(text)
