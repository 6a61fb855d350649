"""
Checkpoints: a JSON manifest plus one raw blob of little-endian floats.
"""
from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import TYPE_CHECKING, Any, Mapping

import numpy as np

from library.exceptions import DataError

if TYPE_CHECKING:
    from numpy.typing import NDArray

FORMAT_VERSION = 1


def save_checkpoint(
    stem: str | Path,
    arrays: Mapping[str, NDArray],
    metadata: Mapping[str, Any] | None = None,
) -> Path:
    """
    Write named arrays to ``<stem>.json`` and ``<stem>.bin``.

    :param stem: Path of the files without extension.
    :param arrays: Parameters and buffers by name; stored as float32.
    :param metadata: JSON-serializable hyperparameters and layer list.
    :return: Path to the manifest.
    """
    stem = Path(stem)
    blob_file = stem.with_suffix(".bin")
    entries = []
    offset = 0
    with open(blob_file, "wb") as file:
        for name, array in arrays.items():
            values = np.asarray(array, dtype="<f4")
            file.write(values.tobytes(order="C"))
            entries.append(
                {"name": name, "shape": list(values.shape), "offset": offset}
            )
            offset += values.size
    manifest = {
        "format_version": FORMAT_VERSION,
        "dtype": "<f4",
        "blob": blob_file.name,
        "arrays": entries,
        "metadata": dict(metadata or {}),
    }
    manifest_file = stem.with_suffix(".json")
    with open(manifest_file, "w") as file:
        json.dump(manifest, file, indent=2)
    logging.info(f"Saved checkpoint with {len(entries)} arrays to {manifest_file}.")
    return manifest_file


def load_checkpoint(
    manifest_file: str | Path
) -> tuple[dict[str, NDArray], dict[str, Any]]:
    """
    Load a checkpoint written by :func:`save_checkpoint`.

    :param manifest_file: Path to the manifest or the common stem.
    :raises DataError: If the blob is shorter than the manifest states.
    :return: Tuple of the arrays by name and the metadata.
    """
    manifest_file = Path(manifest_file)
    if manifest_file.suffix != ".json":
        manifest_file = manifest_file.with_suffix(".json")
    with open(manifest_file, "r") as file:
        manifest = json.load(file)
    blob = np.fromfile(manifest_file.parent / manifest["blob"], dtype="<f4")
    arrays = {}
    for entry in manifest["arrays"]:
        count = int(np.prod(entry["shape"]))
        start = entry["offset"]
        if start + count > blob.size:
            raise DataError(
                f"Checkpoint blob of {manifest_file} is truncated at array "
                f"{entry['name']}."
            )
        arrays[entry["name"]] = blob[start:start + count].reshape(entry["shape"])
    return arrays, manifest["metadata"]
