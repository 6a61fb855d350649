"""
Moving-window traversal of a part along its build axis.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from library import constants
from library.assembly import clipping, placement
from library.exceptions import WindowTooSmall
from library.spatial import model as spatial
from library.surface.surface_map import reroll

if TYPE_CHECKING:
    from library.gan.bank import PoreBank
    from library.spatial.model import PoreSpec, SpatialModel
    from library.surface.surface_map import SurfaceMap

MIN_WINDOW_VOXELS = 4


@dataclass(frozen=True)
class QueuedSpec:
    """A pore specification waiting for placement, in global order."""
    cell: int
    index: int
    spec: PoreSpec


@dataclass
class MovingWindow:
    """
    Axial window of length ``dz`` advancing in steps of ``dz / 2``.

    :param dz: Window length in micrometres.
    :param length: Length of the part in micrometres.
    :param position: Index of the current window.
    :param queue: Specifications not yet placed, in global order.
    """
    dz: float
    length: float
    position: int = 0
    queue: list[QueuedSpec] = field(default_factory=list)

    @property
    def cell_length(self) -> float:
        return self.dz / 2

    @property
    def n_cells(self) -> int:
        return max(1, math.ceil(self.length / self.cell_length - 1e-9))

    @property
    def n_windows(self) -> int:
        return max(1, self.n_cells - 1)

    @property
    def z_0(self) -> float:
        return self.position * self.cell_length

    @property
    def z_f(self) -> float:
        return min(self.z_0 + self.dz, self.length)

    @property
    def is_last(self) -> bool:
        return self.position >= self.n_windows - 1

    def cell_range(self, cell: int) -> tuple[float, float]:
        low = cell * self.cell_length
        return low, min(low + self.cell_length, self.length)


def _cell_specs(
    model: SpatialModel, window: MovingWindow, cell: int, seed: int
) -> list[QueuedSpec]:
    rng = np.random.default_rng([seed, cell])
    specs = spatial.sample_window(model, window.cell_range(cell), rng)
    return [QueuedSpec(cell, k, spec) for k, spec in enumerate(specs)]


def _place_spec(
    part: placement.PartRealization,
    item: QueuedSpec,
    model: SpatialModel,
    bank: PoreBank,
    window: MovingWindow,
    seed: int,
    retries: int,
) -> placement.LedgerEntry:
    """Match and place one specification, relocating on rejection."""
    spec = item.spec
    bank_id = placement.match_pore(spec, bank, model.population_std)
    pore = bank.pores[bank_id]
    location = spec.location
    for attempt in range(retries + 1):
        if attempt:
            rng = np.random.default_rng([seed, item.cell, item.index, attempt])
            location = spatial.sample_location(
                model, spec.bin_id, window.cell_range(item.cell), rng
            )
        outcome = placement.place_pore(part, pore, location)
        if outcome:
            return placement.LedgerEntry(
                bank_id, spec, location, "placed", attempt, outcome.voxels
            )
    logging.warning(
        f"Skipped pore {bank_id} of bin {spec.bin_id} (volume "
        f"{spec.volume_um3:.1f} um^3, anisotropy {spec.anisotropy:.3f}, "
        f"theta_z {spec.theta_z:.1f}) after {retries} relocations: "
        f"{outcome.reason}."
    )
    return placement.LedgerEntry(bank_id, spec, spec.location, "skipped", retries)


def _blocks(
    item: QueuedSpec, bank: PoreBank, model: SpatialModel,
    window: MovingWindow, voxel_size: float
) -> bool:
    """Whether the pore at its drawn location may reach beyond ``z_f``."""
    if window.is_last:
        return False
    bank_id = placement.match_pore(item.spec, bank, model.population_std)
    reach = item.spec.location[2] + bank.pores[bank_id].extent[2] * voxel_size
    return reach > window.z_f


def traverse(
    model: SpatialModel,
    bank: PoreBank,
    dims: tuple[int, int, int],
    voxel_size: float = constants.VOXEL_SIZE,
    window_dz: int = constants.WINDOW_DZ_VOXELS,
    seed: int = 0,
    retries: int = constants.PLACEMENT_RETRIES,
    windowed: bool = True,
    part: placement.PartRealization | None = None,
) -> placement.PartRealization:
    """
    Populate a part with pores window by window.

    The part is divided into axial cells of half a window. Every cell
    draws its specifications from a generator seeded with
    ``(seed, cell)``; window ``w`` covers cells ``w`` and ``w + 1``.
    Specifications are placed in global order. A pore that may reach
    beyond the upper window bound is deferred together with all
    specifications behind it, so windowed and whole-part traversal
    produce identical ledgers.

    The window bounds the queue of pending specifications only; the
    returned part always holds the full grid.

    :param model: The spatial model.
    :param bank: The pore bank.
    :param dims: Grid dims (nx, ny, nz).
    :param voxel_size: Voxel edge length in micrometres.
    :param window_dz: Window length in voxels.
    :param seed: Base seed of all random draws.
    :param retries: Relocations per pore before it is skipped.
    :param windowed: Whether to place window by window or all cells
        in a single pass.
    :param part: The part to populate; a fully solid part if None.
    :raises WindowTooSmall: If the window is shorter than four voxels.
    :return: The populated part with its ledger.
    """
    if window_dz < MIN_WINDOW_VOXELS:
        raise WindowTooSmall(
            f"Moving window of {window_dz} voxels is shorter than the "
            f"minimum of {MIN_WINDOW_VOXELS} voxels."
        )
    if part is None:
        part = placement.PartRealization.solid(dims, voxel_size)
    window = MovingWindow(window_dz * voxel_size, dims[2] * voxel_size)
    logging.info(
        f"Traversing {window.length:.0f} um in {window.n_windows} windows "
        f"of {window.dz:.0f} um."
    )
    if not windowed:
        for cell in range(window.n_cells):
            window.queue.extend(_cell_specs(model, window, cell, seed))
        for item in window.queue:
            part.ledger.append(
                _place_spec(part, item, model, bank, window, seed, retries)
            )
        window.queue.clear()
        return part

    queued_cells = 0
    for position in range(window.n_windows):
        window.position = position
        while queued_cells <= min(position + 1, window.n_cells - 1):
            window.queue.extend(_cell_specs(model, window, queued_cells, seed))
            queued_cells += 1
        placed = 0
        while window.queue:
            if _blocks(window.queue[0], bank, model, window, voxel_size):
                break
            item = window.queue.pop(0)
            part.ledger.append(
                _place_spec(part, item, model, bank, window, seed, retries)
            )
            placed += 1
        logging.debug(
            f"Window {position} [{window.z_0:.0f}, {window.z_f:.0f}] um: "
            f"{placed} processed, {len(window.queue)} carried over."
        )
    return part


def grid_dims(
    surface: SurfaceMap, voxel_size: float = constants.VOXEL_SIZE, margin: int = 2
) -> tuple[int, int, int]:
    """Smallest grid holding the rolled-up surface plus a margin."""
    max_radius = surface.nominal_radius + max(surface.values.max(), 0.0)
    upper = surface.axis_center.max(axis=0) + max_radius
    nx, ny = (np.ceil(upper / voxel_size).astype(int) + margin).tolist()
    nz = int(round(surface.length_um / voxel_size))
    return nx, ny, nz


def assemble_part(
    model: SpatialModel,
    bank: PoreBank,
    surface: SurfaceMap,
    dims: tuple[int, int, int] | None = None,
    voxel_size: float = constants.VOXEL_SIZE,
    window_dz: int = constants.WINDOW_DZ_VOXELS,
    seed: int = 0,
    windowed: bool = True,
    retries: int = constants.PLACEMENT_RETRIES,
) -> placement.PartRealization:
    """
    Assemble a complete part realization.

    Pores are placed into a solid grid and then clipped against the
    boundary rolled up from ``surface``.

    :param model: The spatial model.
    :param bank: The pore bank.
    :param surface: The (synthetic) surface map.
    :param dims: Grid dims; derived from the surface if None.
    :param voxel_size: Voxel edge length in micrometres.
    :param window_dz: Window length in voxels.
    :param seed: Base seed.
    :param windowed: Whether to traverse with the moving window.
    :param retries: Relocations per pore before it is skipped.
    :return: The clipped part realization.
    """
    if dims is None:
        dims = grid_dims(surface, voxel_size)
    part_mask = reroll(surface, dims, voxel_size).part_mask
    part = traverse(
        model, bank, dims, voxel_size, window_dz, seed, retries, windowed
    )
    part.surface = surface
    clipping.clip_to_boundary(part, part_mask)
    statuses = [entry.status for entry in part.ledger]
    logging.info(
        f"Assembled part with {len(part.pores())} pores "
        f"({statuses.count('skipped')} skipped, "
        f"{statuses.count('clipped')} clipped, "
        f"{statuses.count('dissolved') + statuses.count('removed')} lost "
        f"to the boundary)."
    )
    return part
