"""
Loading functions for the artifacts written by the pipeline stages.

Volumes and surface maps share the header-plus-raw layout; the header
content tells them apart.
"""
from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import TYPE_CHECKING, Literal

from library.exceptions import DataError, EmptyDataset
from library.processing import pore_metrics
from library.surface import io as surface_io
from library.voxels import io as volume_io

if TYPE_CHECKING:
    from numpy.typing import NDArray

    from library.surface.surface_map import SurfaceMap
    from library.voxels.volume import VoxelVolume

ArtifactKind = Literal["volume", "surface"]


def artifact_kind(header_file: str | Path) -> ArtifactKind | None:
    """
    Identify a JSON file as volume or surface header.

    :param header_file: Any JSON file.
    :return: ``volume``, ``surface`` or None for other JSON files.
    """
    try:
        with open(header_file, "r") as file:
            header = json.load(file)
    except (json.JSONDecodeError, UnicodeDecodeError):
        return None
    if not isinstance(header, dict) or "data_file" not in header:
        return None
    if "dims" in header:
        return "volume"
    if "n_theta" in header:
        return "surface"
    return None


def find_headers(directory: str | Path, kind: ArtifactKind) -> list[Path]:
    """
    Return the sorted headers of one kind in a directory.

    :param directory: The directory to search, not recursively.
    :param kind: The artifact kind.
    :raises DataError: If the directory does not exist.
    :return: Sorted list of header paths.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise DataError(f"The artifact directory {directory} does not exist.")
    headers = [p for p in sorted(directory.glob("*.json")) if artifact_kind(p) == kind]
    logging.debug(f"Found {len(headers)} {kind} headers in {directory}.")
    return headers


def load_volumes(directory: str | Path) -> list[tuple[str, VoxelVolume]]:
    """
    Load all volumes of a directory.

    :param directory: The directory holding volume headers.
    :raises EmptyDataset: If the directory holds no volume.
    :return: List of tuples of file stem and volume, sorted by stem.
    """
    headers = find_headers(directory, "volume")
    if not headers:
        raise EmptyDataset(f"No part volumes found in {directory}.")
    logging.info(f"Loading {len(headers)} volumes from {directory}.")
    return [(header.stem, volume_io.load_volume(header)) for header in headers]


def load_surfaces(directory: str | Path) -> list[tuple[str, SurfaceMap]]:
    """
    Load all surface maps of a directory.

    :param directory: The directory holding surface headers.
    :raises EmptyDataset: If the directory holds no map.
    :return: List of tuples of file stem and map, sorted by stem.
    """
    headers = find_headers(directory, "surface")
    if not headers:
        raise EmptyDataset(f"No surface maps found in {directory}.")
    return [(header.stem, surface_io.load_surface(header)) for header in headers]


def load_metric_table(
    directory: str | Path, pattern: str = "*_metrics.csv"
) -> dict[str, NDArray]:
    """
    Read and concatenate all metric CSV files matching ``pattern``.

    :param directory: The directory holding the CSV files.
    :param pattern: Glob pattern of the files.
    :raises EmptyDataset: If no file matches.
    :return: The concatenated metric table.
    """
    files = sorted(Path(directory).glob(pattern))
    if not files:
        raise EmptyDataset(f"No metric tables matching {pattern} in {directory}.")
    tables = [pore_metrics.read_metrics_csv(f) for f in files]
    table = pore_metrics.concatenate_tables(tables)
    logging.info(
        f"Loaded metrics of {len(table['volume_um3'])} pores from "
        f"{len(files)} files."
    )
    return table
