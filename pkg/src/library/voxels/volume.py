"""
Voxel grid types: phase volumes, labeled volumes and single pores.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from library import constants
from library.exceptions import InvalidVolumeError

if TYPE_CHECKING:
    from numpy.typing import NDArray


def _freeze(array: NDArray) -> NDArray:
    """Return a read-only view of the given array."""
    view = array.view()
    view.flags.writeable = False
    return view


@dataclass(frozen=True, eq=False)
class VoxelVolume:
    """
    A three-dimensional grid of phase values with a physical voxel size.

    The array is indexed ``[x, y, z]``. Every voxel holds one of the
    phase codes :data:`~library.constants.SOLID`,
    :data:`~library.constants.PORE` or
    :data:`~library.constants.EXTERIOR`. The data array is made
    read-only on construction; operations that modify a volume work on
    a copy.

    :param data: Array of shape (nx, ny, nz) and dtype uint8.
    :param voxel_size: Edge length of a voxel in micrometres.
    """
    data: NDArray
    voxel_size: float = constants.VOXEL_SIZE

    def __post_init__(self):
        data = np.asarray(self.data)
        if data.ndim != 3:
            raise InvalidVolumeError(
                f"Volume data must be three-dimensional, got shape "
                f"{data.shape}."
            )
        if min(data.shape) < 1:
            raise InvalidVolumeError(f"Invalid volume dims {data.shape}.")
        if not self.voxel_size > 0:
            raise InvalidVolumeError(
                f"Voxel size must be positive, got {self.voxel_size}."
            )
        if data.dtype.kind not in "biu" and np.any(
            data != np.round(data)
        ):
            raise InvalidVolumeError(
                "Volume contains non-integral phase values."
            )
        if data.max() > constants.EXTERIOR or data.min() < 0:
            raise InvalidVolumeError(
                "Volume contains values outside of the phase encoding."
            )
        object.__setattr__(self, "data", _freeze(data.astype(np.uint8)))

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.data.shape

    @property
    def pore_mask(self) -> NDArray:
        return self.data == constants.PORE

    @property
    def part_mask(self) -> NDArray:
        """Boolean mask of all voxels belonging to the part (not exterior)."""
        return self.data != constants.EXTERIOR

    def pore_voxel_count(self) -> int:
        return int(np.count_nonzero(self.pore_mask))


@dataclass(frozen=True, eq=False)
class LabeledVolume:
    """
    A volume of connected-component ids; 0 marks background.

    :param labels: Integer array of shape (nx, ny, nz). Ids are the
        contiguous range 1..``n_labels``.
    :param n_labels: Number of components.
    :param voxel_size: Edge length of a voxel in micrometres.
    :param connectivity: The connectivity used to find the components.
    """
    labels: NDArray
    n_labels: int
    voxel_size: float
    connectivity: int = constants.CONNECTIVITY

    def __post_init__(self):
        object.__setattr__(self, "labels", _freeze(np.asarray(self.labels)))

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.labels.shape

    def component_sizes(self) -> NDArray:
        """Return voxel counts of components 1..n_labels."""
        return np.bincount(self.labels.ravel(),
                           minlength=self.n_labels + 1)[1:]


@dataclass(frozen=True, eq=False)
class Pore:
    """
    A single connected pore.

    :param voxels: Integer array of shape (N, 3) with the voxel offsets
        relative to ``bbox_origin``.
    :param bbox_origin: Voxel coordinates (x, y, z) of the bounding box
        corner in the parent volume.
    :param voxel_size: Edge length of a voxel in micrometres.
    :param label: Id of the component in the parent labeled volume, or
        -1 for pores not taken from a labeled volume.
    """
    voxels: NDArray
    bbox_origin: tuple[int, int, int] = (0, 0, 0)
    voxel_size: float = constants.VOXEL_SIZE
    label: int = -1
    _extent: tuple[int, int, int] = field(init=False, repr=False)

    def __post_init__(self):
        voxels = np.asarray(self.voxels, dtype=np.int64).reshape(-1, 3)
        if len(voxels) and voxels.min() < 0:
            raise InvalidVolumeError("Pore voxel offsets must be non-negative.")
        object.__setattr__(self, "voxels", _freeze(voxels))
        object.__setattr__(
            self, "bbox_origin", tuple(int(c) for c in self.bbox_origin)
        )
        if len(voxels):
            extent = tuple(int(e) for e in voxels.max(axis=0) + 1)
        else:
            extent = (0, 0, 0)
        object.__setattr__(self, "_extent", extent)

    @property
    def n_voxels(self) -> int:
        return len(self.voxels)

    @property
    def extent(self) -> tuple[int, int, int]:
        """Side lengths of the bounding box in voxels."""
        return self._extent

    @property
    def volume_um3(self) -> float:
        return self.n_voxels * self.voxel_size**3

    @property
    def below_reliable_volume(self) -> bool:
        """Whether the pore is too small to be identified reliably in CT."""
        return self.volume_um3 < constants.RELIABLE_VOLUME_UM3

    def mask(self) -> NDArray:
        """Return a boolean array of the bounding box marking pore voxels."""
        mask = np.zeros(self.extent, dtype=bool)
        mask[tuple(self.voxels.T)] = True
        return mask

    def absolute_voxels(self) -> NDArray:
        """Return voxel coordinates in the parent volume, shape (N, 3)."""
        return self.voxels + np.asarray(self.bbox_origin)

    def centroid_offset(self) -> NDArray:
        """Mean voxel offset relative to the bounding box origin."""
        return self.voxels.mean(axis=0)
