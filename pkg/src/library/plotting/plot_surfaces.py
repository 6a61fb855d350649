"""
Plotting tools for unrolled surface maps.
"""
from __future__ import annotations

from typing import TYPE_CHECKING, Mapping

import cmasher  # noqa: F401
import matplotlib.pyplot as plt
import numpy as np

if TYPE_CHECKING:
    from matplotlib.figure import Figure
    from numpy.typing import NDArray

    from library.surface.surface_map import SurfaceMap


def plot_surface_maps(
    surfaces: Mapping[str, SurfaceMap],
    cmap: str = "cmr.fusion",
    common_range: bool = True,
) -> tuple[Figure, NDArray]:
    """
    Show surface maps side by side, angle against height.

    Function returns figure and axes and does NOT save the figure.

    :param surfaces: Maps keyed by panel title, e.g. ``measured`` and
        ``smoothed``.
    :param cmap: Name of the diverging colormap.
    :param common_range: Whether all panels share one symmetric value
        range.
    :return: The figure and the array of axes.
    """
    n_panels = max(len(surfaces), 1)
    fig, axes = plt.subplots(
        1, n_panels, figsize=(3.5 * n_panels, 4.5), squeeze=False
    )
    fig.set_tight_layout(True)
    axes = axes[0]
    limit = None
    if common_range and surfaces:
        limit = max(float(np.abs(s.values).max()) for s in surfaces.values())
    for ax, (title, surface) in zip(axes, surfaces.items()):
        vmax = limit or float(np.abs(surface.values).max()) or 1.0
        image = ax.imshow(
            surface.values,
            origin="lower",
            aspect="auto",
            extent=(0, 360, 0, surface.length_um),
            cmap=cmap,
            vmin=-vmax,
            vmax=vmax,
        )
        ax.set_title(title, fontsize=10)
        ax.set_xlabel(r"$\theta$ [deg]")
        fig.colorbar(image, ax=ax, label=r"$\delta r$ [$\mu$m]")
    axes[0].set_ylabel(r"$z$ [$\mu$m]")
    return fig, axes
