"""
Unrolled surface maps: extraction from and re-rolling into voxel volumes.

A surface map stores the radial deviation r(theta, z) of the part
boundary from a cylinder of nominal radius. Rows of ``values`` are z
slices, columns are the angles ``theta_k = 2 pi k / n_theta``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from scipy import ndimage

from library import constants
from library.exceptions import DataError, DoesNotFit, EmptySlice
from library.voxels.volume import VoxelVolume

if TYPE_CHECKING:
    from numpy.typing import NDArray

RAY_STEP = 0.25
"""Sampling step along the rays in voxels"""


@dataclass(frozen=True, eq=False)
class SurfaceMap:
    """
    Radial deviation of a part boundary from a perfect cylinder.

    :param values: Array of shape (n_z, n_theta) of deviations in
        micrometres.
    :param nominal_radius: Radius of the reference cylinder in
        micrometres.
    :param z_spacing: Axial distance between rows in micrometres.
    :param axis_center: Array of shape (n_z, 2) holding the (x, y)
        position of the axis for every row in micrometres.
    """
    values: NDArray
    nominal_radius: float
    z_spacing: float
    axis_center: NDArray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2 or min(values.shape) < 4:
            raise DataError(
                f"Surface maps need at least 4x4 samples, got {values.shape}."
            )
        if not np.all(np.isfinite(values)):
            raise DataError("Surface map contains non-finite values.")
        if not self.nominal_radius > 0:
            raise DataError(
                f"Nominal radius must be positive, got {self.nominal_radius}."
            )
        centers = np.asarray(self.axis_center, dtype=np.float64)
        if centers.shape != (values.shape[0], 2):
            raise DataError(
                f"Axis centers of shape {centers.shape} do not match "
                f"{values.shape[0]} rows."
            )
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "axis_center", centers)

    @property
    def n_z(self) -> int:
        return self.values.shape[0]

    @property
    def n_theta(self) -> int:
        return self.values.shape[1]

    @property
    def theta_spacing_um(self) -> float:
        """Arc length between columns at the nominal radius."""
        return 2 * np.pi * self.nominal_radius / self.n_theta

    @property
    def length_um(self) -> float:
        return self.n_z * self.z_spacing

    def with_values(self, values: NDArray) -> SurfaceMap:
        """Return a copy with the same geometry but new deviations."""
        return SurfaceMap(
            values, self.nominal_radius, self.z_spacing, self.axis_center
        )


def _boundary_radii(
    part_slice: NDArray, center: NDArray, angles: NDArray
) -> NDArray:
    """
    Cast rays from ``center`` and return the outermost boundary radius.

    Occupancy is interpolated bilinearly between voxel centers; the
    boundary is the 0.5 crossing between the outermost sample inside
    the part and the following sample.

    :param part_slice: Boolean mask of shape (nx, ny).
    :param center: Ray origin in voxel units (voxel centers at i + 0.5).
    :param angles: Ray directions in radians.
    :return: Radii in voxel units, one per angle.
    """
    corners = np.array(
        [[0, 0], [part_slice.shape[0], 0], [0, part_slice.shape[1]],
         list(part_slice.shape)]
    )
    r_max = np.linalg.norm(corners - center, axis=1).max() + 1.0
    radii = np.arange(0.0, r_max + RAY_STEP, RAY_STEP)
    x = center[0] + np.cos(angles)[:, None] * radii[None, :]
    y = center[1] + np.sin(angles)[:, None] * radii[None, :]
    occupancy = ndimage.map_coordinates(
        part_slice.astype(np.float64),
        [x.ravel() - 0.5, y.ravel() - 0.5],
        order=1,
        mode="constant",
        cval=0.0,
    ).reshape(x.shape)
    inside = occupancy >= 0.5
    # index of the outermost inside sample on every ray
    last = inside.shape[1] - 1 - np.argmax(inside[:, ::-1], axis=1)
    last = np.minimum(last, inside.shape[1] - 2)
    rows = np.arange(len(angles))
    occ_in = occupancy[rows, last]
    occ_out = occupancy[rows, last + 1]
    fraction = np.where(
        occ_in > occ_out, (occ_in - 0.5) / (occ_in - occ_out + 1e-300), 0.0
    )
    return radii[last] + np.clip(fraction, 0.0, 1.0) * RAY_STEP


def unroll(volume: VoxelVolume, n_theta: int) -> SurfaceMap:
    """
    Unroll the outer boundary of a part into a surface map.

    For every z-slice, rays are cast from the centroid of the part
    voxels (solid and pore) at angles ``2 pi k / n_theta`` and the
    radius of the outermost part boundary is recorded with sub-voxel
    interpolation. The nominal radius is the mean over all radii.

    :param volume: The part volume.
    :param n_theta: Number of angular samples, at least 4.
    :raises EmptySlice: If a slice contains no part voxels.
    :return: The surface map with one row per slice.
    """
    angles = 2 * np.pi * np.arange(n_theta) / n_theta
    part = volume.part_mask
    radii = np.zeros((volume.dims[2], n_theta))
    centers = np.zeros((volume.dims[2], 2))
    for k in range(volume.dims[2]):
        part_slice = part[:, :, k]
        coords = np.argwhere(part_slice)
        if len(coords) == 0:
            raise EmptySlice(f"Slice {k} contains no solid voxels.")
        centers[k] = coords.mean(axis=0) + 0.5
        radii[k] = _boundary_radii(part_slice, centers[k], angles)
    radii_um = radii * volume.voxel_size
    nominal_radius = float(radii_um.mean())
    logging.debug(
        f"Unrolled {volume.dims[2]} slices with nominal radius "
        f"{nominal_radius:.2f} um."
    )
    return SurfaceMap(
        radii_um - nominal_radius,
        nominal_radius,
        volume.voxel_size,
        centers * volume.voxel_size,
    )


def sample_periodic(values: NDArray, rows: NDArray, columns: NDArray) -> NDArray:
    """
    Bilinear interpolation, periodic along columns and clamped along rows.

    :param values: Array of shape (n_rows, n_columns).
    :param rows: Fractional row coordinates.
    :param columns: Fractional column coordinates (any real value).
    :return: Interpolated values of the broadcast shape of the inputs.
    """
    n_rows, n_columns = values.shape
    rows = np.clip(rows, 0.0, n_rows - 1)
    r0 = np.minimum(np.floor(rows).astype(np.int64), n_rows - 2) if n_rows > 1 else 0
    wr = rows - r0
    c_floor = np.floor(columns)
    wc = columns - c_floor
    c0 = c_floor.astype(np.int64) % n_columns
    c1 = (c0 + 1) % n_columns
    r1 = np.minimum(r0 + 1, n_rows - 1)
    top = (1 - wc) * values[r0, c0] + wc * values[r0, c1]
    bottom = (1 - wc) * values[r1, c0] + wc * values[r1, c1]
    return (1 - wr) * top + wr * bottom


def boundary_radius_field(
    surface: SurfaceMap, dims: tuple[int, int, int], voxel_size: float
) -> tuple[NDArray, NDArray, NDArray]:
    """
    Evaluate the boundary at every voxel of a grid.

    :param surface: The surface map.
    :param dims: Grid dims (nx, ny, nz).
    :param voxel_size: Voxel edge length in micrometres.
    :return: Tuple of the voxel radii from the axis, the boundary
        radius at the voxel's angle, both in micrometres and of shape
        ``dims``, and the per-slice axis centers of shape (nz, 2).
    """
    nx, ny, nz = dims
    z_centers = (np.arange(nz) + 0.5) * voxel_size
    row_coords = np.clip(z_centers / surface.z_spacing - 0.5, 0, surface.n_z - 1)
    row_index = np.arange(surface.n_z)
    centers = np.column_stack(
        [
            np.interp(row_coords, row_index, surface.axis_center[:, 0]),
            np.interp(row_coords, row_index, surface.axis_center[:, 1]),
        ]
    )
    x = (np.arange(nx) + 0.5) * voxel_size
    y = (np.arange(ny) + 0.5) * voxel_size
    dx = x[:, None, None] - centers[None, None, :, 0]
    dy = y[None, :, None] - centers[None, None, :, 1]
    radius = np.hypot(dx, dy)
    angle = np.arctan2(dy, dx) % (2 * np.pi)
    columns = angle * surface.n_theta / (2 * np.pi)
    rows = np.broadcast_to(row_coords[None, None, :], radius.shape)
    boundary = surface.nominal_radius + sample_periodic(
        surface.values, rows, columns
    )
    return radius, boundary, centers


def reroll(
    surface: SurfaceMap, dims: tuple[int, int, int], voxel_size: float
) -> VoxelVolume:
    """
    Turn a surface map back into a part volume.

    A voxel is solid iff its distance from the slice axis is at most
    the interpolated boundary radius r(theta, z); all other voxels are
    exterior.

    :param surface: The surface map.
    :param dims: Grid dims (nx, ny, nz).
    :param voxel_size: Voxel edge length in micrometres.
    :raises DoesNotFit: If the boundary leaves the grid in any slice.
    :return: Volume of solid and exterior voxels.
    """
    radius, boundary, centers = boundary_radius_field(surface, dims, voxel_size)
    max_radius = surface.nominal_radius + surface.values.max()
    extent = np.array(dims[:2]) * voxel_size
    if (
        np.any(centers - max_radius < 0)
        or np.any(centers + max_radius > extent[None, :])
    ):
        raise DoesNotFit(
            f"A boundary of radius up to {max_radius:.1f} um does not fit "
            f"into a grid of {extent[0]:.1f} x {extent[1]:.1f} um."
        )
    data = np.where(radius <= boundary, constants.SOLID, constants.EXTERIOR)
    return VoxelVolume(data.astype(np.uint8), voxel_size)
