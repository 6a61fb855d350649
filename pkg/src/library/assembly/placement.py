"""
Matching specifications to banked pores and stamping them into a part.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np

from library import constants
from library.exceptions import EmptyBank
from library.voxels import labeling
from library.voxels.volume import VoxelVolume
from typedef import Rejected

if TYPE_CHECKING:
    from numpy.typing import NDArray

    from library.gan.bank import PoreBank
    from library.spatial.model import PoreSpec
    from library.surface.surface_map import SurfaceMap
    from library.voxels.volume import Pore

LEDGER_COLUMNS = ("bank_id", "x", "y", "z", "status", "retries")


@dataclass
class LedgerEntry:
    """
    Outcome of one pore specification.

    :param bank_id: The matched bank pore.
    :param spec: The specification.
    :param location: Final centroid location (x, y, z) in micrometres.
    :param status: ``placed``, ``skipped``, ``clipped``, ``dissolved``
        or ``removed``.
    :param retries: Relocations needed before the pore was placed or
        skipped.
    :param voxels: Absolute coordinates of the stamped voxels, shape
        (N, 3); empty unless placed.
    """
    bank_id: int
    spec: PoreSpec
    location: tuple[float, float, float]
    status: str
    retries: int = 0
    voxels: NDArray = field(default_factory=lambda: np.zeros((0, 3), np.int64))

    @property
    def is_pore(self) -> bool:
        """Whether the entry still corresponds to a pore of the part."""
        return self.status in ("placed", "clipped")


@dataclass
class PartRealization:
    """
    A part under assembly.

    :param data: Mutable phase array of shape (nx, ny, nz).
    :param voxel_size: Voxel edge length in micrometres.
    :param ledger: One entry per processed specification, in
        processing order.
    :param surface: The surface map the part boundary was rolled from,
        if any.
    """
    data: NDArray
    voxel_size: float = constants.VOXEL_SIZE
    ledger: list[LedgerEntry] = field(default_factory=list)
    surface: SurfaceMap | None = None

    @classmethod
    def solid(
        cls, dims: tuple[int, int, int], voxel_size: float = constants.VOXEL_SIZE
    ) -> PartRealization:
        return cls(np.full(dims, constants.SOLID, dtype=np.uint8), voxel_size)

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.data.shape

    def volume(self) -> VoxelVolume:
        """Return an immutable copy of the current phase volume."""
        return VoxelVolume(self.data.copy(), self.voxel_size)

    def pores(self) -> list[LedgerEntry]:
        return [entry for entry in self.ledger if entry.is_pore]


@dataclass(frozen=True, eq=False)
class Placed:
    """
    A successful placement.

    :param origin: Voxel index of the pore bounding box corner.
    :param voxels: Absolute coordinates of the stamped voxels.
    """
    origin: tuple[int, int, int]
    voxels: NDArray


def match_pore(
    spec: PoreSpec, bank: PoreBank, scale: NDArray | None = None
) -> int:
    """
    Find the bank pore closest to a specification.

    Distances are Euclidean in (volume, anisotropy, theta_z), each
    divided by its population standard deviation.

    :param spec: The specification.
    :param bank: The pore bank.
    :param scale: Standard deviations of the three properties; unit
        scale if None or zero.
    :raises EmptyBank: If the bank holds no pores.
    :return: The bank id; ties resolve to the lowest id.
    """
    if len(bank) == 0:
        raise EmptyBank("Cannot match a pore specification to an empty bank.")
    scale = np.ones(3) if scale is None else np.asarray(scale, dtype=np.float64)
    scale = np.where(scale > 0, scale, 1.0)
    distances = np.linalg.norm((bank.features() - spec.features()) / scale, axis=1)
    return int(np.argmin(distances))


def placement_origin(
    pore: Pore, location: tuple[float, float, float], voxel_size: float
) -> NDArray:
    """Bounding box corner that puts the pore centroid at ``location``."""
    target = np.asarray(location) / voxel_size - 0.5 - pore.centroid_offset()
    return np.floor(target + 0.5).astype(np.int64)


def _local_components(data: NDArray, region: tuple[slice, ...]) -> int:
    return labeling.label_mask(data[region] == constants.PORE)[1]


def place_pore(
    part: PartRealization, pore: Pore, location: tuple[float, float, float]
) -> Placed | Rejected:
    """
    Stamp a pore with its centroid at ``location`` unless it would merge.

    The pore is accepted iff the number of pore components in its
    bounding box dilated by one voxel grows by exactly one. On
    rejection the part is left bit-identical.

    :param part: The part, modified in place on success.
    :param pore: The pore to place.
    :param location: Centroid location (x, y, z) in micrometres.
    :return: The placement or the rejection.
    """
    origin = placement_origin(pore, location, part.voxel_size)
    extent = np.asarray(pore.extent)
    if np.any(origin < 0) or np.any(origin + extent > np.asarray(part.dims)):
        return Rejected("outside grid")
    low = np.maximum(origin - 1, 0)
    high = np.minimum(origin + extent + 1, part.dims)
    region = tuple(slice(a, b) for a, b in zip(low, high))
    before = _local_components(part.data, region)
    saved = part.data[region].copy()
    voxels = pore.voxels + origin
    part.data[tuple(voxels.T)] = constants.PORE
    after = _local_components(part.data, region)
    if after != before + 1:
        part.data[region] = saved
        return Rejected("merges with a neighbor")
    return Placed(tuple(int(o) for o in origin), voxels)


def write_ledger_csv(part: PartRealization, path: str | Path) -> None:
    """
    Write one row per ledger entry.

    :param part: The assembled part.
    :param path: The CSV file.
    """
    rows = [
        (entry.bank_id, *(f"{c:.4f}" for c in entry.location), entry.status, entry.retries)
        for entry in part.ledger
    ]
    np.savetxt(
        path,
        np.array(rows, dtype=object).reshape(-1, len(LEDGER_COLUMNS)),
        delimiter=",",
        header=",".join(LEDGER_COLUMNS),
        comments="",
        fmt="%s",
    )
    logging.debug(f"Wrote ledger of {len(part.ledger)} entries to {path}.")


def read_ledger_csv(path: str | Path) -> dict[str, NDArray]:
    """Read a ledger CSV into columns; ``status`` stays a string column."""
    data = np.genfromtxt(
        path, delimiter=",", names=True, dtype=None, encoding="utf-8", ndmin=1
    )
    if data.size == 0:
        return {name: np.zeros(0) for name in LEDGER_COLUMNS}
    return {name: np.atleast_1d(data[name]) for name in LEDGER_COLUMNS}
