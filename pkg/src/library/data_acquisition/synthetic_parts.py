"""
Synthetic ground truth parts with known generating parameters.

The parts stand in for CT scans: a cylinder with a band-limited rough
boundary, filled with randomly oriented ellipsoidal pores whose
centres follow a radial density law.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np
from scipy import ndimage
from scipy.spatial.transform import Rotation

from library import constants
from library.exceptions import ConfigError
from library.spatial.model import PartGeometry
from library.surface import io as surface_io
from library.surface.surface_map import SurfaceMap, reroll
from library.voxels import io as volume_io
from library.voxels.volume import Pore, VoxelVolume
from typedef import Rejected

if TYPE_CHECKING:
    from numpy.typing import NDArray

MANIFEST_NAME = "manifest.json"


@dataclass(frozen=True)
class SyntheticPartConfig:
    """
    Parameters of the synthetic ground truth.

    :param n_parts: Number of parts to generate.
    :param radius_um: Nominal radius of the cylinder.
    :param length_um: Length of the cylinder along z.
    :param voxel_size: Voxel edge length in micrometres.
    :param n_theta: Angular samples of the boundary map.
    :param roughness_um: Standard deviation of the radial deviation.
    :param correlation_um: Correlation length of the roughness along
        both surface axes.
    :param n_pores: Pores requested per part.
    :param density_gradient: Gradient g of the areal pore density
        ``1 + g r / R``.
    :param pore_radius_fraction: Pore centres lie within this fraction
        of the nominal radius.
    :param axis_median_um: Median of the lognormal semi-axis lengths.
    :param axis_sigma: Log standard deviation of the semi-axes.
    :param margin_voxels: Solid-free margin around the boundary.
    """
    n_parts: int = 2
    radius_um: float = 400.0
    length_um: float = 1024.0
    voxel_size: float = constants.VOXEL_SIZE
    n_theta: int = 512
    roughness_um: float = 6.0
    correlation_um: float = 40.0
    n_pores: int = 500
    density_gradient: float = 1.0
    pore_radius_fraction: float = 0.9
    axis_median_um: float = 10.0
    axis_sigma: float = 0.3
    margin_voxels: int = 4

    def __post_init__(self):
        if self.n_parts < 1 or self.n_pores < 0:
            raise ConfigError(
                f"Need at least one part and a non-negative pore count, got "
                f"{self.n_parts} parts with {self.n_pores} pores."
            )
        if min(self.radius_um, self.length_um, self.voxel_size, self.axis_median_um) <= 0:
            raise ConfigError("Lengths of the synthetic parts must be positive.")
        if not 0 < self.pore_radius_fraction <= 1:
            raise ConfigError(
                f"Pore radius fraction must lie in (0, 1], got "
                f"{self.pore_radius_fraction}."
            )
        if self.density_gradient <= -1:
            raise ConfigError(
                f"Density gradient must exceed -1, got {self.density_gradient}."
            )

    @property
    def dims(self) -> tuple[int, int, int]:
        reach = self.radius_um + 5 * self.roughness_um
        side = math.ceil(2 * reach / self.voxel_size) + 2 * self.margin_voxels
        return side, side, int(round(self.length_um / self.voxel_size))

    @property
    def geometry(self) -> PartGeometry:
        center = self.dims[0] * self.voxel_size / 2
        return PartGeometry(
            (center, center), self.radius_um, self.dims[2] * self.voxel_size
        )


@dataclass(frozen=True)
class TruePore:
    """Generating parameters of one accepted pore."""
    center_um: tuple[float, float, float]
    semi_axes_um: tuple[float, float, float]
    quaternion: tuple[float, float, float, float]
    n_voxels: int


@dataclass
class SyntheticPart:
    """A generated part with its boundary map and true pores."""
    volume: VoxelVolume
    surface: SurfaceMap
    pores: list[TruePore]
    rejected: int
    seed: list[int]


def rough_surface(config: SyntheticPartConfig, rng: np.random.Generator) -> SurfaceMap:
    """
    Band-limited radial deviations around the nominal radius.

    White noise is low-pass filtered with a Gaussian kernel, periodic
    in theta, and rescaled to the requested standard deviation.

    :param config: The part configuration.
    :param rng: Random generator.
    :return: Map of shape (nz, n_theta) on the axis of the part.
    """
    n_z = config.dims[2]
    noise = rng.normal(size=(n_z, config.n_theta))
    theta_spacing = 2 * np.pi * config.radius_um / config.n_theta
    sigma = (config.correlation_um / config.voxel_size, config.correlation_um / theta_spacing)
    smooth = ndimage.gaussian_filter(noise, sigma, mode=("reflect", "wrap"))
    std = smooth.std()
    values = smooth / std * config.roughness_um if std > 0 else smooth
    center = np.asarray(config.geometry.center)
    return SurfaceMap(
        values - values.mean(),
        config.radius_um,
        config.voxel_size,
        np.tile(center, (n_z, 1)),
    )


def sample_radius(
    n: int, radius: float, gradient: float, rng: np.random.Generator
) -> NDArray:
    """
    Draw radii of points with areal density proportional to ``1 + g r / R``.

    :param n: Number of radii.
    :param radius: Outer radius R.
    :param gradient: Density gradient g > -1.
    :param rng: Random generator.
    :return: Array of shape (n, ).
    """
    peak = max(1.0, 1.0 + gradient)
    radii = np.zeros(0)
    while len(radii) < n:
        candidates = radius * np.sqrt(rng.uniform(size=2 * (n - len(radii)) + 8))
        accept = rng.uniform(0, peak, len(candidates)) <= 1 + gradient * candidates / radius
        radii = np.concatenate([radii, candidates[accept]])
    return radii[:n]


def radial_density_raster(
    geometry: PartGeometry, gradient: float, fraction: float = 1.0, grid_side: int = 300
) -> NDArray:
    """
    The generating pore density on the raster of the spatial model.

    :param geometry: The nominal part cylinder.
    :param gradient: Density gradient g.
    :param fraction: Pores lie within ``fraction * R``.
    :param grid_side: Pixels per axis.
    :return: Array of shape (grid_side, grid_side), unnormalized.
    """
    coords = ((np.arange(grid_side) + 0.5) / grid_side * 2 - 1) * geometry.radius
    x, y = np.meshgrid(coords, coords, indexing="ij")
    r = np.hypot(x, y)
    return np.where(r <= fraction * geometry.radius, 1 + gradient * r / geometry.radius, 0.0)


def rasterize_ellipsoid(
    center_um: NDArray,
    semi_axes_um: NDArray,
    rotation: Rotation,
    voxel_size: float = constants.VOXEL_SIZE,
) -> Pore | Rejected:
    """
    Voxelize a rotated ellipsoid.

    A voxel belongs to the pore iff its centre lies inside.

    :param center_um: Centre (x, y, z).
    :param semi_axes_um: Semi-axis lengths along the body axes.
    :param rotation: Rotation from body to part axes.
    :param voxel_size: Voxel edge length.
    :return: The pore in absolute voxel coordinates, or a rejection if
        no voxel centre falls inside.
    """
    center = np.asarray(center_um, dtype=np.float64)
    reach = float(np.max(semi_axes_um))
    low = np.floor((center - reach) / voxel_size).astype(int)
    high = np.ceil((center + reach) / voxel_size).astype(int) + 1
    grid = np.stack(
        np.meshgrid(*(np.arange(a, b) for a, b in zip(low, high)), indexing="ij"),
        axis=-1,
    ).reshape(-1, 3)
    body = rotation.inv().apply((grid + 0.5) * voxel_size - center)
    inside = np.sum((body / np.asarray(semi_axes_um))**2, axis=1) <= 1
    voxels = grid[inside]
    if len(voxels) == 0:
        return Rejected("empty")
    origin = voxels.min(axis=0)
    return Pore(voxels - origin, tuple(origin), voxel_size)


def _fits(data: NDArray, pore: Pore) -> bool:
    """Inside the grid, fully solid and not touching another pore."""
    voxels = pore.absolute_voxels()
    low = np.asarray(pore.bbox_origin)
    high = low + np.asarray(pore.extent)
    if np.any(low < 1) or np.any(high > np.asarray(data.shape) - 1):
        return False
    if np.any(data[tuple(voxels.T)] != constants.SOLID):
        return False
    region = tuple(slice(a - 1, b + 1) for a, b in zip(low, high))
    return not np.any(data[region] == constants.PORE)


def generate_part(
    config: SyntheticPartConfig, index: int = 0, seed: int = 0
) -> SyntheticPart:
    """
    Generate one synthetic part.

    Every requested pore gets a single attempt; pores leaving the
    part, touching another pore or smaller than the minimum pore size
    are rejected and counted.

    :param config: The configuration.
    :param index: Index of the part, mixed into the seed.
    :param seed: Base seed.
    :return: The part.
    """
    rng = np.random.default_rng([seed, index])
    surface = rough_surface(config, rng)
    data = reroll(surface, config.dims, config.voxel_size).data.copy()
    geometry = config.geometry
    radii = sample_radius(
        config.n_pores, config.pore_radius_fraction * config.radius_um,
        config.density_gradient * config.pore_radius_fraction, rng
    )
    angles = rng.uniform(0, 2 * np.pi, config.n_pores)
    heights = rng.uniform(0, geometry.length, config.n_pores)
    axes = config.axis_median_um * rng.lognormal(0.0, config.axis_sigma, (config.n_pores, 3))
    rotations = Rotation.random(config.n_pores, random_state=rng) if config.n_pores else []
    pores = []
    for k in range(config.n_pores):
        center = np.array([
            geometry.center[0] + radii[k] * np.cos(angles[k]),
            geometry.center[1] + radii[k] * np.sin(angles[k]),
            heights[k],
        ])
        pore = rasterize_ellipsoid(center, axes[k], rotations[k], config.voxel_size)
        if not pore or pore.n_voxels < constants.MIN_PORE_VOXELS or not _fits(data, pore):
            continue
        data[tuple(pore.absolute_voxels().T)] = constants.PORE
        pores.append(
            TruePore(
                tuple(center.tolist()),
                tuple(axes[k].tolist()),
                tuple(rotations[k].as_quat().tolist()),
                pore.n_voxels,
            )
        )
    rejected = config.n_pores - len(pores)
    logging.info(
        f"Generated synthetic part {index} with {len(pores)} pores "
        f"({rejected} rejected)."
    )
    return SyntheticPart(
        VoxelVolume(data, config.voxel_size), surface, pores, rejected, [seed, index]
    )


def part_stem(directory: str | Path, index: int) -> Path:
    return Path(directory) / f"part_{index:03d}"


def save_parts(
    parts: list[SyntheticPart], config: SyntheticPartConfig, directory: str | Path
) -> Path:
    """
    Write volumes, boundary maps and a manifest of the true parameters.

    :param parts: The generated parts.
    :param config: Their configuration.
    :param directory: Output directory, created if needed.
    :return: Path of the manifest.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    entries = []
    for index, part in enumerate(parts):
        stem = part_stem(directory, index)
        volume_io.save_volume(part.volume, stem)
        surface_io.save_surface(part.surface, f"{stem}_surface")
        entries.append(
            {
                "volume": f"{stem.name}.json",
                "surface": f"{stem.name}_surface.json",
                "seed": part.seed,
                "rejected": part.rejected,
                "pores": [asdict(pore) for pore in part.pores],
            }
        )
    manifest = directory / MANIFEST_NAME
    with open(manifest, "w") as file:
        json.dump({"config": asdict(config), "parts": entries}, file, indent=1)
    logging.info(f"Saved {len(parts)} synthetic parts to {directory}.")
    return manifest


def load_manifest(directory: str | Path) -> dict:
    with open(Path(directory) / MANIFEST_NAME, "r") as file:
        return json.load(file)
