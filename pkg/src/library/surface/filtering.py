"""
Smoothing and resampling of surface maps.
"""
from __future__ import annotations

import logging
import math

import numpy as np
from scipy import signal

from library import constants
from library.exceptions import WindowTooSmall
from library.surface.surface_map import SurfaceMap, sample_periodic


def window_samples(window_um: float, spacing_um: float, size: int) -> int:
    """
    Convert a window length in micrometres into an odd sample count.

    The count is rounded up to the next odd number and capped at the
    largest odd number not exceeding ``size``.

    :param window_um: Window length in micrometres.
    :param spacing_um: Sample spacing in micrometres.
    :param size: Number of samples along the axis.
    :return: Odd window length in samples.
    """
    samples = math.ceil(window_um / spacing_um - 1e-9)
    if samples % 2 == 0:
        samples += 1
    largest = size if size % 2 == 1 else size - 1
    return max(min(samples, largest), 1)


def savgol(
    surface: SurfaceMap,
    window_um: float = constants.SAVGOL_WINDOW_UM,
    order: int = constants.SAVGOL_ORDER,
) -> SurfaceMap:
    """
    Separable Savitzky-Golay smoothing along theta, then along z.

    The angular window is converted from micrometres through the arc
    length at the nominal radius. Theta is treated periodically, the z
    edges are extended by replication.

    :param surface: The map to smooth.
    :param window_um: Window length in micrometres along both axes.
    :param order: Polynomial order of the local fits.
    :raises WindowTooSmall: If a window in samples does not exceed the
        polynomial order.
    :return: The smoothed map.
    """
    theta_window = window_samples(
        window_um, surface.theta_spacing_um, surface.n_theta
    )
    z_window = window_samples(window_um, surface.z_spacing, surface.n_z)
    for axis_name, window in (("theta", theta_window), ("z", z_window)):
        if window <= order:
            raise WindowTooSmall(
                f"Savitzky-Golay window of {window} samples along {axis_name} "
                f"must exceed the polynomial order {order}."
            )
    logging.debug(
        f"Savitzky-Golay windows: {theta_window} (theta), {z_window} (z)."
    )
    smoothed = signal.savgol_filter(
        surface.values, theta_window, order, axis=1, mode="wrap"
    )
    smoothed = signal.savgol_filter(
        smoothed, z_window, order, axis=0, mode="nearest"
    )
    return surface.with_values(smoothed)


def demean(surface: SurfaceMap) -> SurfaceMap:
    """
    Subtract the row means, then the column means.

    :param surface: The map.
    :return: Map whose row and column means vanish.
    """
    values = surface.values - surface.values.mean(axis=1, keepdims=True)
    values = values - values.mean(axis=0, keepdims=True)
    return surface.with_values(values)


def axis_means(surface: SurfaceMap) -> tuple[np.ndarray, np.ndarray, float]:
    """
    Return the means removed by :func:`demean`.

    ``values == demeaned + row_means[:, None] + column_means[None, :]``.

    :param surface: The map.
    :return: Tuple of row means (n_z, ), column means of the row-demeaned
        map (n_theta, ) and the grand mean.
    """
    row_means = surface.values.mean(axis=1)
    column_means = (surface.values - row_means[:, None]).mean(axis=0)
    return row_means, column_means, float(surface.values.mean())


def resize(
    surface: SurfaceMap,
    shape: tuple[int, int] = (
        constants.SURFACE_IMAGE_SIDE, constants.SURFACE_IMAGE_SIDE
    ),
) -> SurfaceMap:
    """
    Bilinear resampling to ``shape = (n_z, n_theta)``.

    Theta is periodic, z is resampled with aligned end rows. The axial
    length of the map is preserved.

    :param surface: The map.
    :param shape: The target shape.
    :return: The resampled map; the input itself if the shape matches.
    """
    n_z, n_theta = shape
    if (n_z, n_theta) == surface.values.shape:
        return surface
    if n_z > 1:
        rows = np.linspace(0.0, surface.n_z - 1, n_z)
    else:
        rows = np.zeros(1)
    columns = np.arange(n_theta) * surface.n_theta / n_theta
    values = sample_periodic(surface.values, rows[:, None], columns[None, :])
    index = np.arange(surface.n_z)
    centers = np.column_stack(
        [np.interp(rows, index, surface.axis_center[:, k]) for k in range(2)]
    )
    return SurfaceMap(
        values,
        surface.nominal_radius,
        surface.length_um / n_z,
        centers,
    )
