"""
Reading and writing voxel volumes.

A volume is stored as two files sharing a stem: a JSON header
``<stem>.json`` and a raw file ``<stem>.raw`` holding one unsigned
byte per voxel in x-fastest order.
"""
from __future__ import annotations

import json
import logging
from pathlib import Path

import numpy as np

from library import constants
from library.exceptions import InvalidVolumeError
from library.voxels.volume import VoxelVolume

FORMAT_VERSION = 1


def save_volume(volume: VoxelVolume, stem: str | Path) -> Path:
    """
    Write the volume to ``<stem>.json`` and ``<stem>.raw``.

    :param volume: The volume to save.
    :param stem: Path of the files without extension. Parent
        directories must exist.
    :return: Path to the header file.
    """
    stem = Path(stem)
    raw_file = stem.with_suffix(".raw")
    header = {
        "format_version": FORMAT_VERSION,
        "dims": [int(d) for d in volume.dims],
        "voxel_size": float(volume.voxel_size),
        "phases": constants.PHASES,
        "dtype": "uint8",
        "endianness": "little",
        "order": "x-fastest",
        "data_file": raw_file.name,
    }
    raw_file.write_bytes(volume.data.ravel(order="F").tobytes())
    header_file = stem.with_suffix(".json")
    with open(header_file, "w") as file:
        json.dump(header, file, indent=2)
    logging.debug(f"Saved volume of dims {volume.dims} to {header_file}.")
    return header_file


def load_volume(header_file: str | Path) -> VoxelVolume:
    """
    Load a volume written by :func:`save_volume`.

    :param header_file: Path to the JSON header. A path without suffix
        is interpreted as the common stem.
    :raises InvalidVolumeError: If the raw data does not match the
        header or the header uses an unknown phase encoding.
    :return: The loaded volume.
    """
    header_file = Path(header_file)
    if header_file.suffix != ".json":
        header_file = header_file.with_suffix(".json")
    with open(header_file, "r") as file:
        header = json.load(file)
    if header.get("phases", constants.PHASES) != constants.PHASES:
        raise InvalidVolumeError(
            f"Volume {header_file} uses an unsupported phase encoding "
            f"{header['phases']}."
        )
    dims = tuple(int(d) for d in header["dims"])
    raw_file = header_file.parent / header["data_file"]
    data = np.fromfile(raw_file, dtype=np.uint8)
    if data.size != np.prod(dims):
        raise InvalidVolumeError(
            f"Raw file {raw_file} holds {data.size} voxels, but the header "
            f"specifies dims {dims}."
        )
    return VoxelVolume(data.reshape(dims, order="F"), header["voxel_size"])
