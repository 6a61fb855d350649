"""
Clipping of placed pores against the part boundary.
"""
from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np

from library import constants
from library.voxels import labeling

if TYPE_CHECKING:
    from numpy.typing import NDArray

    from library.assembly.placement import LedgerEntry, PartRealization


def _largest_fragment(voxels: NDArray) -> tuple[NDArray, NDArray]:
    """Split voxels into the largest 26-connected fragment and the rest."""
    low = voxels.min(axis=0)
    local = voxels - low
    mask = np.zeros(local.max(axis=0) + 1, dtype=bool)
    mask[tuple(local.T)] = True
    labels, n_labels = labeling.label_mask(mask)
    if n_labels == 1:
        return voxels, voxels[:0]
    ids = labels[tuple(local.T)]
    keep = np.argmax(np.bincount(ids, minlength=n_labels + 1)[1:]) + 1
    return voxels[ids == keep], voxels[ids != keep]


def _clip_entry(
    entry: LedgerEntry, data: NDArray, part_mask: NDArray, min_voxels: int
) -> None:
    inside = entry.voxels[part_mask[tuple(entry.voxels.T)]]
    if len(inside) == len(entry.voxels):
        return
    if len(inside) == 0:
        entry.status = "removed"
        entry.voxels = inside
        return
    kept, dropped = _largest_fragment(inside)
    data[tuple(dropped.T)] = constants.SOLID
    if len(kept) < min_voxels:
        data[tuple(kept.T)] = constants.SOLID
        entry.status = "dissolved"
        entry.voxels = kept[:0]
        return
    entry.status = "clipped"
    entry.voxels = kept


def clip_to_boundary(
    part: PartRealization,
    part_mask: NDArray,
    min_voxels: int = constants.MIN_PORE_VOXELS,
) -> PartRealization:
    """
    Cut the part to its boundary.

    Voxels outside ``part_mask`` become exterior. A pore cut by the
    boundary keeps its largest remaining fragment; other fragments and
    remnants smaller than ``min_voxels`` are dissolved into solid.
    Pores entirely outside are marked ``removed``.

    :param part: The populated part, modified in place.
    :param part_mask: Boolean array of the part dims, True inside.
    :param min_voxels: Smallest pore that survives clipping.
    :return: The same part.
    """
    part.data[~part_mask] = constants.EXTERIOR
    for entry in part.ledger:
        if entry.is_pore:
            _clip_entry(entry, part.data, part_mask, min_voxels)
    lost = sum(entry.status in ("removed", "dissolved") for entry in part.ledger)
    logging.debug(f"Clipping removed or dissolved {lost} pores.")
    return part
