"""
Binned model of pore counts and pore properties over the cross-section.

The square circumscribing the nominal part circle is tiled with
``N_b x N_b`` bins. Every bin keeps the rate of pores per unit length
along z and the sorted samples of the pore properties observed in it.
Bin ids run ``i * N_b + j`` with ``i`` along x and ``j`` along y.
"""
from __future__ import annotations

import json
import logging
import dataclasses
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Sequence

import numpy as np

from library import constants
from library.exceptions import ConfigError, NoPores

if TYPE_CHECKING:
    from numpy.typing import NDArray

    from library.processing.pore_metrics import PoreMetrics
    from library.surface.surface_map import SurfaceMap

PROPERTY_NAMES = ("volume_um3", "anisotropy", "theta_z")
"""Pore properties drawn per bin, in matching order"""
_SUBSAMPLES = 16
"""Points per bin and axis used to integrate the interior fraction"""


@dataclass(frozen=True)
class PartGeometry:
    """
    Nominal cylinder of a part.

    :param center: Axis position (x, y) in micrometres.
    :param radius: Nominal radius in micrometres.
    :param length: Axial length in micrometres.
    """
    center: tuple[float, float]
    radius: float
    length: float

    @classmethod
    def from_surface(cls, surface: SurfaceMap) -> PartGeometry:
        """Geometry of the part a surface map was unrolled from."""
        center = surface.axis_center.mean(axis=0)
        return cls(
            (float(center[0]), float(center[1])),
            float(surface.nominal_radius),
            float(surface.length_um),
        )

    def contains(self, x: NDArray | float, y: NDArray | float) -> NDArray:
        return np.hypot(
            np.asarray(x) - self.center[0], np.asarray(y) - self.center[1]
        ) <= self.radius


@dataclass(frozen=True, eq=False)
class PoreSpec:
    """
    Prescribed properties and location of one pore to place.

    :param volume_um3: Target volume.
    :param anisotropy: Target anisotropy.
    :param theta_z: Target angle to the z-axis in degrees.
    :param location: Centroid (x, y, z) in micrometres.
    :param bin_id: The bin the spec was drawn from.
    """
    volume_um3: float
    anisotropy: float
    theta_z: float
    location: tuple[float, float, float]
    bin_id: int

    def features(self) -> NDArray:
        return np.array([self.volume_um3, self.anisotropy, self.theta_z])


@dataclass(frozen=True, eq=False)
class SpatialModel:
    """
    A fitted spatial model.

    :param geometry: The nominal part cylinder.
    :param n_bins: Bins per cross-section axis.
    :param counts: Observed pores per bin, shape (N_b^2, ).
    :param samples: Sorted property samples per bin, keyed by property.
    :param global_samples: Sorted property samples of all pores.
    :param interior_fraction: Area fraction of every bin inside the
        nominal circle.
    :param interior_centroid: Centroid (x, y) of the interior part of
        every bin; fallback location of :func:`sample_location`.
    :param population_std: Standard deviations of the properties over
        all pores, in :data:`PROPERTY_NAMES` order.
    """
    geometry: PartGeometry
    n_bins: int
    counts: NDArray
    samples: dict[str, list[NDArray]]
    global_samples: dict[str, NDArray]
    interior_fraction: NDArray
    interior_centroid: NDArray
    population_std: NDArray

    @property
    def bin_width(self) -> float:
        return 2 * self.geometry.radius / self.n_bins

    @property
    def origin(self) -> NDArray:
        """Lower corner (x, y) of the binned square."""
        return np.asarray(self.geometry.center) - self.geometry.radius

    @property
    def rates(self) -> NDArray:
        """Pores per micrometre of axial length in every bin."""
        return self.counts / self.geometry.length

    def bin_bounds(self, bin_id: int) -> tuple[NDArray, NDArray]:
        i, j = divmod(bin_id, self.n_bins)
        low = self.origin + self.bin_width * np.array([i, j])
        return low, low + self.bin_width


def bin_index(
    x: NDArray, y: NDArray, geometry: PartGeometry, n_bins: int
) -> NDArray:
    """
    Return the bin id of every point; points outside the square are
    assigned to the nearest edge bin.
    """
    width = 2 * geometry.radius / n_bins
    i = np.floor((np.asarray(x) - geometry.center[0] + geometry.radius) / width)
    j = np.floor((np.asarray(y) - geometry.center[1] + geometry.radius) / width)
    i = np.clip(i, 0, n_bins - 1).astype(np.int64)
    j = np.clip(j, 0, n_bins - 1).astype(np.int64)
    return i * n_bins + j


def _interior(geometry: PartGeometry, n_bins: int) -> tuple[NDArray, NDArray]:
    """Interior area fraction and interior centroid of every bin."""
    width = 2 * geometry.radius / n_bins
    fine = (np.arange(n_bins * _SUBSAMPLES) + 0.5) * width / _SUBSAMPLES
    x, y = np.meshgrid(
        fine + geometry.center[0] - geometry.radius,
        fine + geometry.center[1] - geometry.radius,
        indexing="ij",
    )
    inside = geometry.contains(x, y)
    shape = (n_bins, _SUBSAMPLES, n_bins, _SUBSAMPLES)
    inside_blocks = inside.reshape(shape)
    fraction = inside_blocks.mean(axis=(1, 3)).ravel()
    n_inside = inside_blocks.sum(axis=(1, 3)).ravel()
    centroid = np.zeros((n_bins * n_bins, 2))
    for k, coords in enumerate((x, y)):
        total = np.where(inside, coords, 0.0).reshape(shape).sum(axis=(1, 3)).ravel()
        centroid[:, k] = total / np.maximum(n_inside, 1)
    # bins without interior: project the bin center onto the circle
    empty = n_inside == 0
    if np.any(empty):
        centers = np.column_stack(
            [x.reshape(shape).mean(axis=(1, 3)).ravel(),
             y.reshape(shape).mean(axis=(1, 3)).ravel()]
        )[empty]
        offset = centers - np.asarray(geometry.center)
        norm = np.linalg.norm(offset, axis=1, keepdims=True)
        centroid[empty] = (
            np.asarray(geometry.center) + 0.999 * geometry.radius * offset / norm
        )
    return fraction, centroid


def fit(
    pores: Sequence[PoreMetrics],
    geometry: PartGeometry,
    n_bins: int = constants.N_BINS,
) -> SpatialModel:
    """
    Fit per-bin pore rates and property distributions.

    Pores are assigned to bins by the (x, y) position of their centroid.
    Bins without pores keep a zero rate and inherit the global property
    samples.

    :param pores: Metrics of all ground truth pores of a part.
    :param geometry: The nominal part cylinder.
    :param n_bins: Bins per cross-section axis, at least 1.
    :raises NoPores: If no pores are given.
    :raises ConfigError: If ``n_bins < 1``.
    :return: The fitted model.
    """
    if n_bins < 1:
        raise ConfigError(f"The spatial model needs N_b >= 1, got {n_bins}.")
    if not pores:
        raise NoPores("Cannot fit a spatial model without pores.")
    centroids = np.array([p.centroid for p in pores], dtype=np.float64)
    bins = bin_index(centroids[:, 0], centroids[:, 1], geometry, n_bins)
    counts = np.bincount(bins, minlength=n_bins * n_bins)
    values = {
        name: np.array([getattr(p, name) for p in pores], dtype=np.float64)
        for name in PROPERTY_NAMES
    }
    global_samples = {name: np.sort(v) for name, v in values.items()}
    samples = {
        name: [
            np.sort(v[bins == b]) if counts[b] else global_samples[name]
            for b in range(n_bins * n_bins)
        ]
        for name, v in values.items()
    }
    fraction, centroid = _interior(geometry, n_bins)
    population_std = np.array([np.std(values[name]) for name in PROPERTY_NAMES])
    logging.info(
        f"Fitted spatial model with {n_bins}x{n_bins} bins to {len(pores)} "
        f"pores; {np.count_nonzero(counts)} bins are occupied."
    )
    return SpatialModel(
        geometry,
        n_bins,
        counts,
        samples,
        global_samples,
        fraction,
        centroid,
        population_std,
    )


def pool_populations(
    populations: Sequence[tuple[Sequence[PoreMetrics], PartGeometry]],
) -> tuple[list[PoreMetrics], PartGeometry]:
    """
    Merge the pores of several parts into one population for fitting.

    Cross-section positions are moved onto the axis of the first part;
    the pooled geometry has the mean radius and the summed length, so
    fitted rates are rates per part length.

    :param populations: Tuples of pore metrics and part geometry.
    :raises NoPores: If no population is given.
    :return: The pooled metrics and geometry.
    """
    if not populations:
        raise NoPores("Cannot pool an empty set of parts.")
    reference = np.asarray(populations[0][1].center, dtype=np.float64)
    pooled = []
    for metrics, geometry in populations:
        shift = reference - np.asarray(geometry.center, dtype=np.float64)
        for m in metrics:
            x, y, z = m.centroid
            centroid = (float(x + shift[0]), float(y + shift[1]), float(z))
            pooled.append(dataclasses.replace(m, centroid=centroid))
    geometry = PartGeometry(
        (float(reference[0]), float(reference[1])),
        float(np.mean([g.radius for _, g in populations])),
        float(sum(g.length for _, g in populations)),
    )
    return pooled, geometry


def sample_counts(
    model: SpatialModel, window_dz: float, rng: np.random.Generator
) -> NDArray:
    """
    Draw the number of pores of every bin in a window.

    :param model: The spatial model.
    :param window_dz: Axial length of the window in micrometres.
    :param rng: Random generator.
    :return: Integer array of shape (N_b^2, ), Poisson with mean
        ``rate * window_dz``.
    """
    return rng.poisson(model.rates * window_dz)


def inverse_cdf(sorted_samples: NDArray, u: NDArray | float) -> NDArray:
    """
    Evaluate the inverse of the linearly interpolated empirical CDF.

    The k-th of n sorted samples sits at probability ``k / (n - 1)``.

    :param sorted_samples: Ascending samples, at least one.
    :param u: Probabilities in [0, 1].
    :return: Values of the shape of ``u``.
    """
    n = len(sorted_samples)
    if n == 1:
        return np.full(np.shape(u), sorted_samples[0], dtype=np.float64)
    return np.interp(u, np.linspace(0.0, 1.0, n), sorted_samples)


def sample_location(
    model: SpatialModel,
    bin_id: int,
    z_range: tuple[float, float],
    rng: np.random.Generator,
    attempts: int = constants.LOCATION_ATTEMPTS,
) -> tuple[float, float, float]:
    """
    Draw a location uniformly over the interior part of a bin.

    :param model: The spatial model.
    :param bin_id: The bin.
    :param z_range: Lower and upper z bound in micrometres.
    :param rng: Random generator.
    :param attempts: Rejection sampling attempts before falling back
        to the interior centroid of the bin.
    :return: Location (x, y, z) in micrometres.
    """
    low, high = model.bin_bounds(bin_id)
    z = float(rng.uniform(*z_range))
    for _ in range(attempts):
        x, y = rng.uniform(low, high)
        if model.geometry.contains(x, y):
            return float(x), float(y), z
    x, y = model.interior_centroid[bin_id]
    return float(x), float(y), z


def sample_spec(
    model: SpatialModel,
    bin_id: int,
    rng: np.random.Generator,
    z_range: tuple[float, float] | None = None,
) -> PoreSpec:
    """
    Draw the properties and location of one pore of a bin.

    :param model: The spatial model.
    :param bin_id: The bin.
    :param rng: Random generator.
    :param z_range: Axial range of the location; the whole part if None.
    :return: The pore specification.
    """
    properties = [
        float(inverse_cdf(model.samples[name][bin_id], rng.uniform()))
        for name in PROPERTY_NAMES
    ]
    if z_range is None:
        z_range = (0.0, model.geometry.length)
    location = sample_location(model, bin_id, z_range, rng)
    return PoreSpec(*properties, location, bin_id)


def sample_window(
    model: SpatialModel,
    z_range: tuple[float, float],
    rng: np.random.Generator,
) -> list[PoreSpec]:
    """Draw counts for an axial range and one spec per pore, bin by bin."""
    counts = sample_counts(model, z_range[1] - z_range[0], rng)
    return [
        sample_spec(model, int(b), rng, z_range)
        for b in np.flatnonzero(counts)
        for _ in range(counts[b])
    ]


def density_map(model: SpatialModel) -> NDArray:
    """
    Pores per cubic micrometre of interior volume in every bin.

    :return: Array of shape (N_b, N_b), first axis along x; zero for
        bins without interior.
    """
    area = model.bin_width**2 * model.interior_fraction
    volume = area * model.geometry.length
    density = np.divide(
        model.counts, volume, out=np.zeros(len(volume)), where=volume > 0
    )
    return density.reshape(model.n_bins, model.n_bins)


def rasterize_density(model: SpatialModel, grid_side: int = 300) -> NDArray:
    """
    Sample :func:`density_map` on a fine grid over the binned square.

    Pixels outside the nominal circle are zero.

    :param model: The spatial model.
    :param grid_side: Pixels per axis.
    :return: Array of shape (grid_side, grid_side).
    """
    geometry = model.geometry
    coords = (np.arange(grid_side) + 0.5) / grid_side * 2 * geometry.radius
    x, y = np.meshgrid(
        coords + geometry.center[0] - geometry.radius,
        coords + geometry.center[1] - geometry.radius,
        indexing="ij",
    )
    bins = bin_index(x, y, geometry, model.n_bins)
    raster = density_map(model).ravel()[bins]
    return np.where(geometry.contains(x, y), raster, 0.0)


def density_l1(first: NDArray, second: NDArray) -> float:
    """
    L1 distance between two density rasters normalized to unit sum.

    :param first: Raster of any shape.
    :param second: Raster of the same shape.
    :return: Distance in [0, 2].
    """
    first = np.asarray(first, dtype=np.float64)
    second = np.asarray(second, dtype=np.float64)
    first = first / first.sum() if first.sum() > 0 else first
    second = second / second.sum() if second.sum() > 0 else second
    return float(np.abs(first - second).sum())


def save_model(model: SpatialModel, path: str | Path) -> None:
    """
    Write the model to a JSON file.

    :param model: The model.
    :param path: The file.
    """
    document = {
        "geometry": {
            "center": list(model.geometry.center),
            "radius": model.geometry.radius,
            "length": model.geometry.length,
        },
        "n_bins": model.n_bins,
        "counts": model.counts.tolist(),
        "interior_fraction": model.interior_fraction.tolist(),
        "interior_centroid": model.interior_centroid.tolist(),
        "population_std": model.population_std.tolist(),
        "global_samples": {k: v.tolist() for k, v in model.global_samples.items()},
        "samples": {
            name: [
                None if model.counts[b] == 0 else arrays[b].tolist()
                for b in range(len(arrays))
            ]
            for name, arrays in model.samples.items()
        },
    }
    with open(path, "w") as file:
        json.dump(document, file)
    logging.info(f"Saved spatial model to {path}.")


def load_model(path: str | Path) -> SpatialModel:
    """Read a model written by :func:`save_model`."""
    with open(path, "r") as file:
        document = json.load(file)
    geometry = PartGeometry(
        tuple(document["geometry"]["center"]),
        document["geometry"]["radius"],
        document["geometry"]["length"],
    )
    global_samples = {
        k: np.asarray(v, dtype=np.float64) for k, v in document["global_samples"].items()
    }
    samples = {
        name: [
            global_samples[name] if entry is None else np.asarray(entry, dtype=np.float64)
            for entry in entries
        ]
        for name, entries in document["samples"].items()
    }
    return SpatialModel(
        geometry,
        document["n_bins"],
        np.asarray(document["counts"], dtype=np.int64),
        samples,
        global_samples,
        np.asarray(document["interior_fraction"]),
        np.asarray(document["interior_centroid"]).reshape(-1, 2),
        np.asarray(document["population_std"]),
    )
