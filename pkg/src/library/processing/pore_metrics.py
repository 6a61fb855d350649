"""
Geometric descriptors of single pores and pore populations.

All moments treat voxel centers as unit point masses. Angles are
reported in degrees: ``theta_z`` is the angle between the principal
axis and the tensile axis z, folded to [0, 90]; ``phi_xy`` is the
in-plane angle of the axis projection to the x-axis, folded to
[0, 180).
"""
from __future__ import annotations

import dataclasses
import logging
from pathlib import Path
from typing import TYPE_CHECKING, Sequence

import numpy as np
from scipy import spatial

from library import constants
from library.exceptions import DataError, InsufficientPores
from library.processing import parallelization

if TYPE_CHECKING:
    from numpy.typing import NDArray

    from library.voxels.volume import Pore

CSV_COLUMNS = (
    "id",
    "x",
    "y",
    "z",
    "volume_um3",
    "anisotropy",
    "theta_z",
    "phi_xy",
    "nn_um",
    "lambda_min",
    "lambda_mid",
    "lambda_max",
    "extent_um",
    "below_reliable_volume",
)


@dataclasses.dataclass(frozen=True)
class PoreMetrics:
    """
    Derived descriptors of one pore.

    :param volume_um3: Pore volume in cubic micrometres.
    :param centroid: Centroid (x, y, z) in micrometres in part
        coordinates.
    :param eigvals: Inertia tensor eigenvalues, ascending, in voxel^2.
    :param anisotropy: A = 1 - lambda_min / lambda_max.
    :param theta_z: Angle of the principal axis to z in degrees.
    :param phi_xy: In-plane angle of the principal axis in degrees.
    :param extent_um: Longest side of the bounding box in micrometres.
    :param nn_distance: Distance to the nearest other pore centroid in
        micrometres, None until computed for a population.
    :param pore_id: Identifier of the pore, e.g. its label.
    """
    volume_um3: float
    centroid: tuple[float, float, float]
    eigvals: tuple[float, float, float]
    anisotropy: float
    theta_z: float
    phi_xy: float
    extent_um: float
    nn_distance: float | None = None
    pore_id: int = -1

    @property
    def below_reliable_volume(self) -> bool:
        return self.volume_um3 < constants.RELIABLE_VOLUME_UM3


def inertia_tensor(pore: Pore) -> NDArray:
    """
    Return the second central moment tensor of the pore voxels.

    ``I_xx = sum(dy^2 + dz^2)``, ``I_xy = -sum(dx dy)`` and so on, with
    offsets taken relative to the voxel centroid, in voxel^2.

    :param pore: A non-empty pore.
    :return: Symmetric array of shape (3, 3).
    """
    coords = pore.voxels.astype(np.float64) + 0.5
    offsets = coords - coords.mean(axis=0)
    second_moments = offsets.T @ offsets
    return np.trace(second_moments) * np.eye(3) - second_moments


def eig_sym3(matrix: NDArray) -> tuple[NDArray, NDArray]:
    """
    Eigendecomposition of a symmetric 3x3 matrix.

    Eigenvalues are sorted ascending. The eigenvectors are the columns
    of the returned matrix; each is flipped such that its first
    component with magnitude above 1e-12 is positive.

    :param matrix: Symmetric matrix, symmetric within 1e-9.
    :raises DataError: If the matrix is not symmetric.
    :return: Tuple of eigenvalues, shape (3, ), and eigenvectors,
        shape (3, 3).
    """
    matrix = np.asarray(matrix, dtype=np.float64)
    scale = max(np.abs(matrix).max(), 1.0)
    if np.abs(matrix - matrix.T).max() > 1e-9 * scale:
        raise DataError(f"Matrix is not symmetric:\n{matrix}")
    eigvals, eigvecs = np.linalg.eigh(matrix)  # ascending
    for column in range(3):
        vector = eigvecs[:, column]
        nonzero = np.flatnonzero(np.abs(vector) > 1e-12)
        if len(nonzero) and vector[nonzero[0]] < 0:
            eigvecs[:, column] = -vector
    return eigvals, eigvecs


def anisotropy(eigvals: Sequence[float]) -> float:
    """
    Return A = 1 - lambda_min / lambda_max, or 0 when lambda_max is 0.

    :param eigvals: Eigenvalues sorted ascending.
    :return: Anisotropy in [0, 1].
    """
    lam_min, lam_max = max(eigvals[0], 0.0), eigvals[-1]
    if lam_max <= 0:
        return 0.0
    return float(min(max(1.0 - lam_min / lam_max, 0.0), 1.0))


def orientation(eigvecs: NDArray, eigvals: NDArray) -> tuple[float, float]:
    """
    Return the angles of the principal axis.

    The principal axis is the eigenvector of the smallest eigenvalue,
    i.e. the long axis of an elongated pore. ``eigvals`` are expected
    in the order of the ``eigvecs`` columns.

    :param eigvecs: Eigenvectors as columns.
    :param eigvals: Corresponding eigenvalues.
    :return: Tuple of ``theta_z`` in [0, 90] and ``phi_xy`` in
        [0, 180), both in degrees. ``phi_xy`` is 0 for an axis parallel
        to z.
    """
    axis = eigvecs[:, int(np.argmin(eigvals))]
    theta_z = np.degrees(np.arccos(np.clip(abs(axis[2]), 0.0, 1.0)))
    if np.hypot(axis[0], axis[1]) < 1e-9:
        return float(theta_z), 0.0
    phi_xy = np.degrees(np.arctan2(axis[1], axis[0])) % 180.0
    if phi_xy >= 180.0:
        phi_xy -= 180.0
    return float(theta_z), float(phi_xy)


def nn_distances(centroids: NDArray | Sequence[Sequence[float]]) -> NDArray:
    """
    Return the distance of every centroid to its nearest neighbor.

    :param centroids: Array of shape (N, 3) in micrometres.
    :raises InsufficientPores: If fewer than two centroids are given.
    :return: Array of shape (N, ) of distances in micrometres.
    """
    centroids = np.asarray(centroids, dtype=np.float64).reshape(-1, 3)
    if len(centroids) < 2:
        raise InsufficientPores(
            f"Nearest neighbor distances need at least two pores, got "
            f"{len(centroids)}."
        )
    tree = spatial.cKDTree(centroids)
    distances, _ = tree.query(centroids, k=2)
    return distances[:, 1]


def metrics_for(pore: Pore) -> PoreMetrics:
    """
    Compute all single-pore metrics.

    The nearest neighbor distance is left empty; it is a population
    quantity (see :func:`population_metrics`).

    :param pore: A non-empty pore.
    :return: The metrics of the pore.
    """
    eigvals, eigvecs = eig_sym3(inertia_tensor(pore))
    theta_z, phi_xy = orientation(eigvecs, eigvals)
    centroid = (
        np.asarray(pore.bbox_origin) + pore.centroid_offset() + 0.5
    ) * pore.voxel_size
    return PoreMetrics(
        volume_um3=pore.volume_um3,
        centroid=tuple(float(c) for c in centroid),
        eigvals=tuple(float(max(e, 0.0)) for e in eigvals),
        anisotropy=anisotropy(eigvals),
        theta_z=theta_z,
        phi_xy=phi_xy,
        extent_um=float(max(pore.extent) * pore.voxel_size),
        pore_id=pore.label,
    )


def population_metrics(
    pores: Sequence[Pore], processes: int = 0
) -> list[PoreMetrics]:
    """
    Compute metrics of all pores including nearest neighbor distances.

    :param pores: The pores of one part.
    :param processes: Number of processes for the per-pore metrics.
    :return: List of metrics in the order of ``pores``. For fewer than
        two pores, the nearest neighbor distance stays None.
    """
    metrics = parallelization.process_data(metrics_for, pores, processes)
    if len(metrics) < 2:
        logging.debug("Fewer than two pores, skipping nearest neighbors.")
        return metrics
    distances = nn_distances([m.centroid for m in metrics])
    return [
        dataclasses.replace(m, nn_distance=float(d))
        for m, d in zip(metrics, distances)
    ]


def metrics_table(metrics: Sequence[PoreMetrics]) -> dict[str, NDArray]:
    """
    Return the metrics as a dictionary of columns.

    Keys are the names of :data:`CSV_COLUMNS`. Missing nearest neighbor
    distances are NaN.

    :param metrics: Sequence of pore metrics.
    :return: Dictionary mapping column names to arrays of shape (N, ).
    """
    # yapf: disable
    rows = [
        (
            m.pore_id, *m.centroid, m.volume_um3, m.anisotropy, m.theta_z,
            m.phi_xy, np.nan if m.nn_distance is None else m.nn_distance,
            *m.eigvals, m.extent_um, float(m.below_reliable_volume)
        )
        for m in metrics
    ]
    # yapf: enable
    array = np.array(rows, dtype=np.float64).reshape(-1, len(CSV_COLUMNS))
    return {name: array[:, i] for i, name in enumerate(CSV_COLUMNS)}


def concatenate_tables(tables: Sequence[dict[str, NDArray]]) -> dict[str, NDArray]:
    """Concatenate metric tables column by column."""
    if not tables:
        return {name: np.zeros(0) for name in CSV_COLUMNS}
    return {
        name: np.concatenate([table[name] for table in tables])
        for name in tables[0].keys()
    }


def write_metrics_csv(metrics: Sequence[PoreMetrics], path: str | Path) -> None:
    """
    Write one row per pore to a CSV file with header.

    :param metrics: The metrics to write.
    :param path: The file to write.
    """
    table = metrics_table(metrics)
    columns = np.column_stack([table[name] for name in CSV_COLUMNS])
    np.savetxt(
        path,
        columns.reshape(-1, len(CSV_COLUMNS)),
        delimiter=",",
        header=",".join(CSV_COLUMNS),
        comments="",
        fmt="%.10g",
    )
    logging.debug(f"Wrote metrics of {len(metrics)} pores to {path}.")


def read_metrics_csv(path: str | Path) -> dict[str, NDArray]:
    """
    Read a metrics CSV file into a dictionary of columns.

    :param path: The file to read.
    :return: Dictionary mapping column names to arrays.
    """
    with open(path, "r") as file:
        header = file.readline().strip().split(",")
        has_rows = bool(file.readline().strip())
    if not has_rows:
        return {name: np.zeros(0) for name in header}
    data = np.genfromtxt(
        path, delimiter=",", names=True, dtype=np.float64, ndmin=1
    )
    return {name: np.atleast_1d(data[name]) for name in data.dtype.names}


def metrics_from_table(table: dict[str, NDArray]) -> list[PoreMetrics]:
    """
    Rebuild metric objects from a table read with :func:`read_metrics_csv`.

    :param table: Dictionary of columns.
    :return: List of metrics.
    """
    metrics = []
    for i in range(len(table["id"])):
        nn_um = table["nn_um"][i]
        metrics.append(
            PoreMetrics(
                volume_um3=float(table["volume_um3"][i]),
                centroid=(
                    float(table["x"][i]),
                    float(table["y"][i]),
                    float(table["z"][i]),
                ),
                eigvals=(
                    float(table["lambda_min"][i]),
                    float(table["lambda_mid"][i]),
                    float(table["lambda_max"][i]),
                ),
                anisotropy=float(table["anisotropy"][i]),
                theta_z=float(table["theta_z"][i]),
                phi_xy=float(table["phi_xy"][i]),
                extent_um=float(table["extent_um"][i]),
                nn_distance=None if np.isnan(nn_um) else float(nn_um),
                pore_id=int(table["id"][i]),
            )
        )
    return metrics
