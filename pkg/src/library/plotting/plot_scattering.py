"""
Plotting tools for scattering coefficients.
"""
from __future__ import annotations

from typing import TYPE_CHECKING, Mapping

import matplotlib.pyplot as plt
import numpy as np

from library.plotting import common

if TYPE_CHECKING:
    from matplotlib.axes import Axes
    from matplotlib.figure import Figure
    from numpy.typing import NDArray


def plot_rose(rose_rows: Mapping[str, NDArray]) -> tuple[Figure, Axes]:
    """
    Rose plot of first-order scattering means.

    Each scale is drawn as a closed polygon over the wavelet angles,
    mirrored to the full circle as the moduli are symmetric under a
    rotation by 180 degrees.

    :param rose_rows: Rows of (angle in degrees, scale j, value) keyed
        by legend label, e.g. ``target`` and ``synthesized``.
    :return: The figure and the polar axes.
    """
    fig = plt.figure(figsize=(5, 5))
    axes = fig.add_subplot(projection="polar")
    styles = ["solid", "dashed", "dotted", "dashdot"]
    for style, (label, rows) in zip(styles * len(rose_rows), rose_rows.items()):
        rows = np.asarray(rows, dtype=np.float64).reshape(-1, 3)
        scales = np.unique(rows[:, 1]).astype(int)
        colors = common.sample_colors("cmr.chroma", max(len(scales), 2))
        for color, j in zip(colors, scales):
            selected = rows[rows[:, 1] == j]
            selected = selected[np.argsort(selected[:, 0])]
            angles = np.deg2rad(np.concatenate([selected[:, 0], selected[:, 0] + 180]))
            values = np.concatenate([selected[:, 2], selected[:, 2]])
            axes.plot(
                np.append(angles, angles[0]),
                np.append(values, values[0]),
                color=color,
                ls=style,
                label=f"{label}, j={j}",
            )
    axes.legend(fontsize=7, loc="upper left", bbox_to_anchor=(1.05, 1.0))
    return fig, axes


def plot_coefficient_band(comparison_rows: NDArray) -> tuple[Figure, Axes]:
    """
    Plot synthesized log coefficients against the target band.

    :param comparison_rows: Rows as written by the coefficient
        comparison export: path columns (order, j1, r1, j2, r2), target
        mean, target std, synthesized value and the inside-band flag.
    :return: The figure and axes objects.
    """
    rows = np.asarray(comparison_rows, dtype=np.float64)
    index = np.arange(len(rows))
    mean, std, synthesized = rows[:, 5], rows[:, 6], rows[:, 7]
    fig, axes = plt.subplots(figsize=(7, 3.5))
    fig.set_tight_layout(True)
    axes.fill_between(
        index,
        mean - 3 * std,
        mean + 3 * std,
        color=common.population_colors["gt"],
        alpha=0.3,
        step="mid",
        label=r"target $\pm 3\sigma$",
    )
    axes.plot(index, mean, color=common.population_colors["gt"], lw=0.8)
    outside = rows[:, 8] < 0.5
    axes.plot(
        index, synthesized, ls="", marker=".", color=common.population_colors["gen"],
        label="synthesized",
    )
    axes.plot(index[outside], synthesized[outside], ls="", marker="x", color="black")
    axes.set_xlabel("scattering path")
    axes.set_ylabel(r"$\log$ coefficient")
    axes.set_title(f"{np.mean(~outside):.0%} of paths inside the band", fontsize=10)
    axes.legend(fontsize=8)
    return fig, axes
