"""
Functions for parallelization of data processing.
"""
from __future__ import annotations

import logging
from typing import Any, Callable, Sequence, TypeVar

import multiprocess as mp

from library.processing import sequential

T = TypeVar("T")


def _auto_chunksize(length: int, processes: int) -> int:
    """Return a chunk size giving every process about four chunks."""
    return max(round(length / processes / 4), 1)


def process_data_parallelized(
    callback: Callable[[Any], T],
    data: Sequence[Any],
    processes: int,
    chunksize: int | None = None,
) -> list[T]:
    """
    Process data using multiprocessing.

    This method calls the given Callable ``callback`` with every entry
    in ``data`` in parallel. The chunking of data is done automatically
    based on the number of processes and the length of the data unless
    a chunk size is given.

    The function returns the results in the order of ``data``, so that
    the outcome is identical to sequential processing.

    :param callback: A function taking a single entry of ``data``. If
        the function requires more arguments, create a wrapper function
        that handles data injection. The function and its results must
        be picklable by ``dill``.
    :param data: Sequence of data to process by handing it as the sole
        argument to the given callback, e.g. a list of pores.
    :param processes: The number of processes to use.
    :param chunksize: The number of entries to process per task. If
        left empty, an appropriate chunk size will be automatically
        calculated and used.
    :return: List of the return values of ``callback``, in order.
    """
    if chunksize is None or chunksize < 1:
        chunksize = _auto_chunksize(len(data), processes)
        logging.debug(f"Autosetting chunksize to {chunksize}.")
    logging.info(
        f"Starting {processes} subprocesses with chunksize {chunksize}."
    )
    with mp.Pool(processes=processes) as pool:
        results = pool.map(callback, data, chunksize=int(chunksize))
        pool.close()
        pool.join()
    logging.info(f"Finished processing data on {processes} processes.")
    return list(results)


def process_data(
    callback: Callable[[Any], T],
    data: Sequence[Any],
    processes: int = 0,
) -> list[T]:
    """
    Process data in parallel if more than one process is requested.

    :param callback: A function taking a single entry of ``data``.
    :param data: The data to process.
    :param processes: Number of processes. Zero or one means sequential
        processing in the current process.
    :return: List of the return values of ``callback``, in order.
    """
    if processes > 1 and len(data) > 1:
        return process_data_parallelized(callback, data, processes)
    return sequential.process_data_sequentially(callback, data)
