"""
Statistical utilities for comparing populations.
"""
from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np
from scipy import stats

from library import constants

if TYPE_CHECKING:
    from numpy.typing import NDArray


def ks_distance(first: NDArray, second: NDArray) -> float:
    """
    Return the two-sample Kolmogorov-Smirnov statistic.

    NaN entries are dropped. If one of the samples is empty, the
    distance is 1 unless both are empty, in which case it is 0.

    :param first: First sample.
    :param second: Second sample.
    :return: KS statistic in [0, 1].
    """
    first = np.asarray(first, dtype=np.float64)
    second = np.asarray(second, dtype=np.float64)
    first = first[np.isfinite(first)]
    second = second[np.isfinite(second)]
    if len(first) == 0 or len(second) == 0:
        return float(len(first) != len(second))
    return float(stats.ks_2samp(first, second).statistic)


def common_range(*samples: NDArray) -> tuple[float, float]:
    """
    Return a range covering all finite values of all samples.

    A degenerate range is widened by 0.5 on each side.

    :param samples: Any number of arrays.
    :return: Tuple of lower and upper bound.
    """
    finite = [np.asarray(s)[np.isfinite(s)] for s in samples]
    finite = [s for s in finite if len(s)]
    if not finite:
        return 0.0, 1.0
    low = min(float(s.min()) for s in finite)
    high = max(float(s.max()) for s in finite)
    if high <= low:
        return low - 0.5, high + 0.5
    return low, high


def normalized_histogram(
    values: NDArray, bins: int, value_range: tuple[float, float]
) -> NDArray:
    """
    Return a histogram whose entries sum to one.

    An empty sample yields an all-zero histogram.

    :param values: The sample; NaN entries are ignored.
    :param bins: Number of bins.
    :param value_range: Lower and upper edge.
    :return: Array of shape (bins, ).
    """
    values = np.asarray(values, dtype=np.float64)
    counts, _ = np.histogram(values[np.isfinite(values)], bins, value_range)
    total = counts.sum()
    if total == 0:
        return counts.astype(np.float64)
    return counts / total


def aligned_histograms(
    first: NDArray,
    second: NDArray,
    bins: int = constants.UNIVARIATE_BINS,
) -> tuple[NDArray, NDArray, NDArray]:
    """
    Return normalized histograms of two samples on common bins.

    :param first: First sample.
    :param second: Second sample.
    :param bins: Number of bins.
    :return: Tuple of bin edges (bins + 1, ) and the two histograms.
    """
    value_range = common_range(first, second)
    edges = np.linspace(value_range[0], value_range[1], bins + 1)
    return (
        edges,
        normalized_histogram(first, bins, value_range),
        normalized_histogram(second, bins, value_range),
    )


def normalized_histogram2d(
    x: NDArray,
    y: NDArray,
    bins: int,
    x_range: tuple[float, float],
    y_range: tuple[float, float],
) -> NDArray:
    """
    Return a 2D histogram whose entries sum to one.

    Pairs with a non-finite component are ignored.

    :param x: First coordinate of the sample.
    :param y: Second coordinate of the sample.
    :param bins: Number of bins along both axes.
    :param x_range: Range of the first coordinate.
    :param y_range: Range of the second coordinate.
    :return: Array of shape (bins, bins), first axis along ``x``.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    finite = np.isfinite(x) & np.isfinite(y)
    counts, _, _ = np.histogram2d(
        x[finite], y[finite], bins=bins, range=[x_range, y_range]
    )
    total = counts.sum()
    if total == 0:
        return counts
    return counts / total


def l1_distance(first: NDArray, second: NDArray) -> float:
    """Return the L1 distance between two normalized histograms."""
    return float(np.abs(np.asarray(first) - np.asarray(second)).sum())


def contour_levels(histogram: NDArray) -> NDArray:
    """
    Return contour levels at 5 %, 15 %, ..., 95 % of the maximum.

    :param histogram: A histogram of any shape.
    :return: Array of ten ascending levels; all zero for an empty
        histogram.
    """
    return np.linspace(0.05, 0.95, 10) * float(np.max(histogram))


def quantile_envelope(
    values: NDArray, lower: float = 0.001, upper: float = 0.999
) -> tuple[float, float]:
    """
    Return the lower and upper quantile of a sample.

    :param values: The sample; NaN entries are ignored.
    :param lower: Lower quantile, defaults to 0.1 %.
    :param upper: Upper quantile, defaults to 99.9 %.
    :return: Tuple of the two quantiles.
    """
    values = np.asarray(values, dtype=np.float64)
    values = values[np.isfinite(values)]
    low, high = np.quantile(values, [lower, upper])
    return float(low), float(high)
