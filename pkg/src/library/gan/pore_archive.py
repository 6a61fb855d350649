"""
HDF5 archive of centred training cubes.

The archive holds one dataset ``cubes`` of shape (M, S, S, S) with the
phase codes of the cubes, one dataset ``source_part`` naming the index
of the part each cube stems from and the voxel size as file attribute.
"""
from __future__ import annotations

import logging
from pathlib import Path
from typing import TYPE_CHECKING, Sequence

import h5py
import numpy as np

from library import constants
from library.exceptions import DataError

if TYPE_CHECKING:
    from numpy.typing import NDArray

    from library.voxels.volume import VoxelVolume


def write_cubes(
    path: str | Path,
    cubes: Sequence[VoxelVolume],
    source_part: Sequence[int] | None = None,
    voxel_size: float = constants.VOXEL_SIZE,
) -> None:
    """
    Write centred pore cubes to an HDF5 archive.

    :param path: The archive file; an existing file is overwritten.
    :param cubes: Cubes of identical side.
    :param source_part: Index of the originating part per cube.
    :param voxel_size: Voxel edge length in micrometres.
    """
    if cubes:
        data = np.stack([c.data for c in cubes]).astype(np.uint8)
    else:
        data = np.zeros((0, 1, 1, 1), dtype=np.uint8)
    if source_part is None:
        source_part = np.zeros(len(data), dtype=np.int32)
    with h5py.File(path, "w") as file:
        file.create_dataset("cubes", data=data, compression="gzip")
        file.create_dataset("source_part", data=np.asarray(source_part, dtype=np.int32))
        file.attrs["voxel_size"] = voxel_size
        file.attrs["cube_side"] = data.shape[1]
    logging.info(f"Archived {len(data)} training cubes in {path}.")


def read_cubes(path: str | Path) -> tuple[NDArray, NDArray, float]:
    """
    Read an archive written by :func:`write_cubes`.

    :param path: The archive file.
    :raises DataError: If the file lacks the cube dataset.
    :return: Tuple of the cubes (M, S, S, S), the source part indices
        (M, ) and the voxel size.
    """
    with h5py.File(path, "r") as file:
        if "cubes" not in file:
            raise DataError(f"{path} is not a training cube archive.")
        cubes = file["cubes"][()]
        source_part = file["source_part"][()]
        voxel_size = float(file.attrs["voxel_size"])
    return cubes, source_part, voxel_size
