"""
Connected-component labeling and pore extraction.
"""
from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np
from scipy import ndimage

from library import constants
from library.exceptions import ConfigError, PoreTooLarge
from library.voxels.volume import LabeledVolume, Pore, VoxelVolume

if TYPE_CHECKING:
    from numpy.typing import NDArray


def structuring_element(connectivity: int) -> NDArray:
    """
    Return the 3x3x3 neighborhood for the given connectivity.

    :param connectivity: Either 6 (face neighbors) or 26 (face, edge
        and corner neighbors).
    :raises ConfigError: For any other connectivity.
    :return: Boolean structuring element for ``scipy.ndimage``.
    """
    if connectivity == 6:
        return ndimage.generate_binary_structure(3, 1)
    elif connectivity == 26:
        return ndimage.generate_binary_structure(3, 3)
    raise ConfigError(f"Unsupported connectivity {connectivity}; use 6 or 26.")


def label_mask(
    mask: NDArray, connectivity: int = constants.CONNECTIVITY
) -> tuple[NDArray, int]:
    """
    Label the connected components of a boolean mask.

    Ids are renumbered in the order in which the components are first
    met when scanning the grid with x varying fastest, then y, then z.
    This makes ids independent of the labeling backend.

    :param mask: Boolean array of shape (nx, ny, nz).
    :param connectivity: 6 or 26.
    :return: Tuple of the integer label array and the number of
        components.
    """
    labels, n_labels = ndimage.label(
        mask, structure=structuring_element(connectivity)
    )
    if n_labels == 0:
        return labels.astype(np.int32), 0
    flat = labels.ravel(order="F")  # x-fastest scan order
    ids, first_seen = np.unique(flat, return_index=True)
    if ids[0] == 0:
        ids, first_seen = ids[1:], first_seen[1:]
    order = ids[np.argsort(first_seen, kind="stable")]
    mapping = np.zeros(n_labels + 1, dtype=np.int32)
    mapping[order] = np.arange(1, n_labels + 1, dtype=np.int32)
    return mapping[labels], n_labels


def label_components(
    volume: VoxelVolume, connectivity: int = constants.CONNECTIVITY
) -> LabeledVolume:
    """
    Label every maximal connected set of pore voxels.

    Solid and exterior voxels receive id 0. An empty volume yields zero
    components.

    :param volume: The phase volume.
    :param connectivity: 6 or 26; defaults to 26.
    :return: The labeled volume with contiguous ids 1..K.
    """
    labels, n_labels = label_mask(volume.pore_mask, connectivity)
    logging.debug(f"Found {n_labels} pore components.")
    return LabeledVolume(labels, n_labels, volume.voxel_size, connectivity)


def extract_pores(
    labeled: LabeledVolume,
    min_voxels: int = constants.MIN_PORE_VOXELS,
) -> list[Pore]:
    """
    Return one pore per component with at least ``min_voxels`` voxels.

    Pores are returned in ascending order of their label id. Smaller
    components are discarded.

    :param labeled: The labeled volume.
    :param min_voxels: Minimum number of voxels of a retained pore.
    :return: List of pores.
    """
    pores = []
    sizes = labeled.component_sizes()
    slices = ndimage.find_objects(labeled.labels)
    for index, bbox in enumerate(slices):
        label = index + 1
        if bbox is None or sizes[index] < min_voxels:
            continue
        offsets = np.argwhere(labeled.labels[bbox] == label)
        origin = tuple(s.start for s in bbox)
        pores.append(Pore(offsets, origin, labeled.voxel_size, label))
    n_discarded = labeled.n_labels - len(pores)
    logging.debug(
        f"Extracted {len(pores)} pores, discarded {n_discarded} components "
        f"below {min_voxels} voxels."
    )
    return pores


def largest_component(
    mask: NDArray, connectivity: int = constants.CONNECTIVITY
) -> NDArray:
    """
    Return the mask of the largest connected component of ``mask``.

    Ties are broken in favor of the lowest label id.

    :param mask: Boolean array.
    :param connectivity: 6 or 26.
    :return: Boolean array of the same shape; all False if ``mask`` is
        empty.
    """
    labels, n_labels = label_mask(mask, connectivity)
    if n_labels == 0:
        return np.zeros_like(mask, dtype=bool)
    sizes = np.bincount(labels.ravel())[1:]
    return labels == (int(np.argmax(sizes)) + 1)


def center_in_cube(pore: Pore, cube_side: int) -> VoxelVolume:
    """
    Place the pore in a solid cube with its centroid at the cube center.

    The centroid of the voxel offsets is moved to ``cube_side // 2``
    along every axis; coordinates are rounded to the nearest voxel,
    with ties rounded toward the origin. Pores whose centroid placement
    would push voxels out of the cube are shifted back inside.

    :param pore: The pore to center.
    :param cube_side: Side length of the cube in voxels.
    :raises PoreTooLarge: If the bounding box exceeds ``cube_side``.
    :return: A cube volume of solid voxels with the pore voxels set.
    """
    extent = np.asarray(pore.extent)
    if np.any(extent > cube_side):
        raise PoreTooLarge(
            f"Pore with bounding box {tuple(extent)} does not fit into a "
            f"cube of side {cube_side}."
        )
    center = cube_side // 2
    shift = np.ceil(center - pore.centroid_offset() - 0.5).astype(int)
    shift = np.clip(shift, 0, cube_side - extent)
    cube = np.full((cube_side, ) * 3, constants.SOLID, dtype=np.uint8)
    cube[tuple((pore.voxels + shift).T)] = constants.PORE
    return VoxelVolume(cube, pore.voxel_size)
