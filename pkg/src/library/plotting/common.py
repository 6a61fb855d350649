"""
Common plotting utilities.
"""
from __future__ import annotations

import logging
from typing import TYPE_CHECKING, Mapping, Sequence

import cmasher
import matplotlib.pyplot as plt
import numpy as np

if TYPE_CHECKING:
    from matplotlib.axes import Axes
    from matplotlib.figure import Figure
    from numpy.typing import NDArray

population_colors = {
    "gt": "dodgerblue",
    "gen": "crimson",
}

population_labels = {
    "gt": "ground truth",
    "gen": "generated",
}

metric_labels = {
    "x": r"$x$ [$\mu$m]",
    "y": r"$y$ [$\mu$m]",
    "volume_um3": r"volume [$\mu$m$^3$]",
    "anisotropy": r"anisotropy $A$",
    "theta_z": r"$\theta_z$ [deg]",
    "nn_um": r"NN distance [$\mu$m]",
}


def label_for(metric: str) -> str:
    return metric_labels.get(metric, metric.replace("_", " "))


def sample_colors(cmap: str, samples: int) -> list[tuple[float, float, float]]:
    """
    Return evenly spaced colors of a colormap.

    The extreme ends of the map are excluded so that all colors remain
    visible on white background.

    :param cmap: Name of the colormap; cmasher maps carry the prefix
        ``cmr.``.
    :param samples: Number of colors.
    :return: List of RGB tuples.
    """
    return cmasher.take_cmap_colors(cmap, samples, cmap_range=(0.1, 0.9))


def overplot_histogram(
    axes: Axes,
    edges: NDArray,
    values: NDArray,
    color: str,
    label: str | None = None,
    fill: bool = False,
) -> Axes:
    """
    Overplot a histogram given by its edges as a step line.

    :param axes: The axes to draw onto.
    :param edges: Bin edges, shape (N + 1, ).
    :param values: Histogram values, shape (N, ).
    :param color: A valid matplotlib color.
    :param label: Legend label.
    :param fill: Whether to shade the area under the line.
    :return: The axes, altered in place.
    """
    axes.stairs(values, edges, color=color, label=label, fill=fill, alpha=0.8)
    return axes


def plot_loss_curves(
    traces: Mapping[str, Sequence[float]],
    xlabel: str = "Epoch",
    ylabel: str = "Loss",
    log: bool = False,
    running_minimum: bool = False,
) -> tuple[Figure, Axes]:
    """
    Plot one or more loss traces.

    :param traces: Mapping of legend labels to loss values.
    :param xlabel: Label of the x-axis.
    :param ylabel: Label of the y-axis.
    :param log: Whether to use a log-scaled y-axis.
    :param running_minimum: Whether to overplot the running minimum of
        every trace as a dashed line.
    :return: The figure and axes objects.
    """
    fig, axes = plt.subplots(figsize=(5, 3.5))
    fig.set_tight_layout(True)
    axes.set_xlabel(xlabel)
    axes.set_ylabel(ylabel)
    if log:
        axes.set_yscale("log")
    colors = sample_colors("cmr.guppy", max(len(traces), 2))
    for color, (label, trace) in zip(colors, traces.items()):
        trace = np.asarray(trace, dtype=np.float64)
        steps = np.arange(1, len(trace) + 1)
        axes.plot(steps, trace, color=color, label=label)
        if running_minimum:
            axes.plot(steps, np.minimum.accumulate(trace), color=color, ls="dashed")
    if traces:
        axes.legend()
    logging.debug(f"Plotted {len(traces)} loss traces.")
    return fig, axes
