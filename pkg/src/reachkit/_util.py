"""Small shared helpers: scalar backend dispatch and ordered parallel map."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction


def is_exact_scalar(x) -> bool:
    """True for scalars that belong to the exact-rational backend.

    ints and Fractions propagate exactly through the closed forms; floats
    select the double-precision backend.  bool is excluded on purpose.
    """
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def exact_div(c, n: int):
    """c / n without falling into float division for exact scalars."""
    if is_exact_scalar(c):
        return Fraction(c) / n
    return c / n


def map_ordered(fn, items, threads: int | None = None) -> list:
    """Apply fn over items, optionally on a thread pool.

    Output order always follows input order, so results are independent of
    the worker count.
    """
    items = list(items)
    if threads is None or threads <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
