"""
Functions for sequential data processing.

See the ``parallelization`` module for better performance.
"""
from __future__ import annotations

import logging
from typing import Any, Callable, Sequence, TypeVar

T = TypeVar("T")


def process_data_sequentially(
    callback: Callable[..., T],
    data: Sequence[Any],
    kwargs: dict[str, Any] | None = None,
) -> list[T]:
    """
    Process data sequentially.

    This method calls the given Callable ``callback`` with every entry
    in ``data`` in order of appearance. Optionally, keyworded arguments
    can be supplied to the Callable. These keyworded arguments will be
    the same across calls, while the positional argument will be from
    the ``data`` sequence and thus vary per call.

    When the log level is set to 15 or lower, progress is printed to
    stdout in place.

    :param callback: A function whose first positional argument is an
        entry of ``data``. Further arguments may be supplied by
        ``kwargs``.
    :param data: Sequence of data points to hand to the callback.
    :param kwargs: A dictionary of keyworded arguments for ``callback``.
        Defaults to None which is equivalent to no further arguments.
    :return: List of the results of ``callback``, in order of ``data``.
    """
    if kwargs is None:
        kwargs = {}
    n_points = len(data)
    logging.debug(f"Start processing {n_points} entries sequentially.")
    results = []
    log_level = logging.getLogger("root").level
    for i, data_point in enumerate(data):
        if log_level <= 15:
            perc = i / n_points * 100
            print(f"Processing entry {i}/{n_points} ({perc:.1f}%)", end="\r")
        results.append(callback(data_point, **kwargs))
    if log_level <= 15 and n_points:
        print(f"Processing entry {n_points}/{n_points} (100.0%)")
    return results
