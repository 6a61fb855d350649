"""
Plotting tools for pore populations and part volumes.
"""
from __future__ import annotations

import logging
from typing import TYPE_CHECKING, Mapping

import matplotlib.pyplot as plt
import numpy as np

from library import constants
from library.plotting import common

if TYPE_CHECKING:
    from matplotlib.axes import Axes
    from matplotlib.figure import Figure
    from numpy.typing import NDArray

    from library.spatial.model import PartGeometry
    from library.validation.reports import (
        BivariateComparison,
        UnivariateComparison,
    )
    from library.voxels.volume import VoxelVolume


def plot_univariate_histograms(
    comparisons: Mapping[str, UnivariateComparison],
) -> tuple[Figure, NDArray]:
    """
    Plot ground truth and generated histograms of every metric.

    Each panel shows both normalized histograms and the KS distance in
    its title. Function returns figure and axes and does NOT save the
    figure.

    :param comparisons: Comparisons keyed by metric name.
    :return: The figure and the flat array of axes.
    """
    n_panels = max(len(comparisons), 1)
    n_cols = min(n_panels, 3)
    n_rows = int(np.ceil(n_panels / n_cols))
    fig, axes = plt.subplots(
        n_rows, n_cols, figsize=(4 * n_cols, 3 * n_rows), squeeze=False
    )
    fig.set_tight_layout(True)
    axes = axes.ravel()
    for ax, (name, comparison) in zip(axes, comparisons.items()):
        for key, hist in (("gt", comparison.gt_hist), ("gen", comparison.gen_hist)):
            common.overplot_histogram(
                ax,
                comparison.edges,
                hist,
                common.population_colors[key],
                common.population_labels[key],
                fill=key == "gt",
            )
        ax.set_xlabel(common.label_for(name))
        ax.set_title(f"KS = {comparison.ks:.3f}", fontsize=10)
    for ax in axes[len(comparisons):]:
        ax.set_axis_off()
    axes[0].legend(fontsize=8)
    return fig, axes


def plot_pair_contours(comparison: BivariateComparison) -> tuple[Figure, Axes]:
    """
    Overplot the contours of both joint histograms of a metric pair.

    Both populations are drawn at the levels of the ground truth
    histogram, i.e. at 5 % to 95 % of its maximum in steps of 10 %.

    :param comparison: The comparison of one pair.
    :return: The figure and axes objects.
    """
    fig, axes = plt.subplots(figsize=(4, 4))
    fig.set_tight_layout(True)
    x_centers = 0.5 * (comparison.x_edges[1:] + comparison.x_edges[:-1])
    y_centers = 0.5 * (comparison.y_edges[1:] + comparison.y_edges[:-1])
    levels = np.unique(comparison.levels)
    if len(levels) > 1:
        for key, hist in (("gt", comparison.gt_hist), ("gen", comparison.gen_hist)):
            axes.contour(
                x_centers,
                y_centers,
                hist.T,
                levels=levels,
                colors=common.population_colors[key],
                linewidths=0.8,
            )
    else:
        logging.warning(
            f"Histogram of pair {comparison.pair} is empty, no contours drawn."
        )
    axes.set_xlabel(common.label_for(comparison.pair[0]))
    axes.set_ylabel(common.label_for(comparison.pair[1]))
    axes.set_title(f"L1 = {comparison.l1:.3f}", fontsize=10)
    return fig, axes


def plot_orthogonal_slices(
    volumes: Mapping[str, VoxelVolume],
) -> tuple[Figure, NDArray]:
    """
    Show the three central orthogonal slices of every volume.

    Rows are volumes, columns the xy, xz and yz slices. Solid, pore and
    exterior phases are drawn in grey, black and white respectively.

    :param volumes: Volumes keyed by their row label.
    :return: The figure and the axes array of shape (rows, 3).
    """
    n_rows = max(len(volumes), 1)
    fig, axes = plt.subplots(n_rows, 3, figsize=(10, 3.3 * n_rows), squeeze=False)
    fig.set_tight_layout(True)
    shades = np.array([0.6, 0.0, 1.0])
    for row, (label, volume) in zip(axes, volumes.items()):
        cx, cy, cz = (d // 2 for d in volume.dims)
        slices = {
            "xy": volume.data[:, :, cz].T,
            "xz": volume.data[:, cy, :].T,
            "yz": volume.data[cx, :, :].T,
        }
        for ax, (plane, data) in zip(row, slices.items()):
            ax.imshow(
                shades[data], cmap="gray", vmin=0, vmax=1, origin="lower",
                interpolation="nearest"
            )
            ax.set_title(f"{label}: {plane}", fontsize=10)
            ax.set_xticks([])
            ax.set_yticks([])
    return fig, axes


def plot_density_map(
    density: NDArray,
    geometry: PartGeometry,
    title: str | None = None,
    cmap: str = "cmr.ember",
) -> tuple[Figure, Axes]:
    """
    Plot a pore density map over the part cross-section.

    :param density: Density of shape (N, N) over the square
        circumscribing the nominal circle, first axis along x.
    :param geometry: The nominal part cylinder.
    :param title: Optional title.
    :param cmap: Name of the colormap.
    :return: The figure and axes objects.
    """
    fig, axes = plt.subplots(figsize=(4.5, 4))
    fig.set_tight_layout(True)
    cx, cy = geometry.center
    r = geometry.radius
    image = axes.imshow(
        density.T,
        origin="lower",
        extent=(cx - r, cx + r, cy - r, cy + r),
        cmap=cmap,
    )
    axes.add_patch(plt.Circle((cx, cy), r, fill=False, color="white", lw=0.8))
    axes.set_xlabel(common.label_for("x"))
    axes.set_ylabel(common.label_for("y"))
    if title:
        axes.set_title(title, fontsize=10)
    fig.colorbar(image, ax=axes, label="pores per bin area")
    return fig, axes


def plot_phase_fractions(volume: VoxelVolume) -> tuple[Figure, Axes]:
    """
    Plot the pore fraction of the part per z-slice.

    :param volume: A part volume.
    :return: The figure and axes objects.
    """
    pores = volume.pore_mask.sum(axis=(0, 1))
    part = volume.part_mask.sum(axis=(0, 1))
    fraction = np.divide(pores, part, out=np.zeros(len(part)), where=part > 0)
    z = (np.arange(volume.dims[2]) + 0.5) * volume.voxel_size
    fig, axes = plt.subplots(figsize=(5, 3))
    fig.set_tight_layout(True)
    axes.plot(z, fraction, color=common.population_colors["gen"])
    axes.set_xlabel(r"$z$ [$\mu$m]")
    axes.set_ylabel("porosity")
    axes.set_title(
        f"mean porosity {pores.sum() / max(part.sum(), 1):.2e} "
        f"(phases {list(constants.PHASES)})",
        fontsize=9,
    )
    return fig, axes
