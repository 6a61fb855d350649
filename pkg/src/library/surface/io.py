"""
Reading and writing surface maps.

A map is stored as a JSON header ``<stem>.json`` plus a raw file
``<stem>.raw`` of little-endian 32-bit floats, theta varying fastest.
"""
from __future__ import annotations

import json
import logging
from pathlib import Path

import cmasher  # noqa: F401
import matplotlib.pyplot as plt
import numpy as np

from library.exceptions import DataError
from library.surface.surface_map import SurfaceMap

FORMAT_VERSION = 1


def save_surface(surface: SurfaceMap, stem: str | Path) -> Path:
    """
    Write the map to ``<stem>.json`` and ``<stem>.raw``.

    Values are stored as 32-bit floats, so a round trip is exact only to
    single precision.

    :param surface: The map to save.
    :param stem: Path of the files without extension.
    :return: Path to the header file.
    """
    stem = Path(stem)
    raw_file = stem.with_suffix(".raw")
    header = {
        "format_version": FORMAT_VERSION,
        "n_theta": surface.n_theta,
        "n_z": surface.n_z,
        "nominal_radius": float(surface.nominal_radius),
        "z_spacing": float(surface.z_spacing),
        "axis_center": surface.axis_center.tolist(),
        "dtype": "<f4",
        "order": "theta-fastest",
        "data_file": raw_file.name,
    }
    raw_file.write_bytes(surface.values.astype("<f4").tobytes(order="C"))
    header_file = stem.with_suffix(".json")
    with open(header_file, "w") as file:
        json.dump(header, file, indent=2)
    logging.debug(f"Saved surface map {surface.values.shape} to {header_file}.")
    return header_file


def load_surface(header_file: str | Path) -> SurfaceMap:
    """
    Load a map written by :func:`save_surface`.

    :param header_file: Path to the JSON header or the common stem.
    :raises DataError: If the raw file does not match the header.
    :return: The loaded map in double precision.
    """
    header_file = Path(header_file)
    if header_file.suffix != ".json":
        header_file = header_file.with_suffix(".json")
    with open(header_file, "r") as file:
        header = json.load(file)
    shape = (int(header["n_z"]), int(header["n_theta"]))
    raw_file = header_file.parent / header["data_file"]
    values = np.fromfile(raw_file, dtype="<f4")
    if values.size != shape[0] * shape[1]:
        raise DataError(
            f"Raw file {raw_file} holds {values.size} values, expected "
            f"{shape[0]} x {shape[1]}."
        )
    return SurfaceMap(
        values.reshape(shape).astype(np.float64),
        header["nominal_radius"],
        header["z_spacing"],
        np.asarray(header["axis_center"]),
    )


def save_preview(
    surface: SurfaceMap, path: str | Path, cmap: str = "cmr.fusion"
) -> None:
    """
    Save an 8-bit PNG preview normalized to the value range.

    :param surface: The map.
    :param path: The PNG file.
    :param cmap: Name of the colormap; cmasher maps are registered
        with the prefix ``cmr.``.
    """
    values = surface.values
    low, high = float(values.min()), float(values.max())
    if high <= low:
        high = low + 1.0
    # z upward, theta to the right
    plt.imsave(path, values[::-1], cmap=cmap, vmin=low, vmax=high)
    logging.debug(f"Saved surface preview to {path}.")
