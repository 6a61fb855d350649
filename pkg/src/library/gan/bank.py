"""
Binarization, plausibility filtering and banking of generated pores.
"""
from __future__ import annotations

import functools
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Sequence

import numpy as np

from library import constants
from library.exceptions import AcceptanceTooLow, DataError
from library.gan import training
from library.processing import parallelization, pore_metrics, statistics
from library.voxels import io, labeling
from library.voxels.volume import Pore, VoxelVolume
from typedef import Rejected

if TYPE_CHECKING:
    from numpy.typing import NDArray

    from library.gan.networks import Generator
    from library.processing.pore_metrics import PoreMetrics

MANIFEST_NAME = "manifest.json"
METRICS_NAME = "metrics.csv"


def binarize_pore(
    cube: NDArray,
    voxel_size: float = constants.VOXEL_SIZE,
    min_voxels: int = constants.MIN_PORE_VOXELS,
) -> Pore | Rejected:
    """
    Turn a generated probability cube into a single pore.

    A voxel is pore iff its pore probability exceeds 0.5. Only the
    largest connected component is kept.

    :param cube: Array of shape (2, S, S, S) with the pore probability
        in channel 0, or (S, S, S) holding that channel alone.
    :param voxel_size: Voxel edge length in micrometres.
    :param min_voxels: Smallest accepted pore.
    :return: The pore with its bounding box origin in cube coordinates,
        or a rejection.
    """
    probability = cube[0] if cube.ndim == 4 else cube
    mask = labeling.largest_component(probability > 0.5)
    count = int(np.count_nonzero(mask))
    if count == 0:
        return Rejected("empty")
    if count < min_voxels:
        return Rejected(f"too small ({count} voxels)")
    voxels = np.argwhere(mask)
    origin = voxels.min(axis=0)
    return Pore(voxels - origin, tuple(origin), voxel_size)


@dataclass(frozen=True)
class PlausibilityBounds:
    """
    Envelopes of acceptable pore descriptors.

    :param volume_um3: Lower and upper pore volume.
    :param anisotropy: Lower and upper anisotropy.
    :param extent_um: Lower and upper longest bounding box side.
    """
    volume_um3: tuple[float, float]
    anisotropy: tuple[float, float]
    extent_um: tuple[float, float]

    @classmethod
    def from_population(
        cls,
        metrics: Sequence[PoreMetrics],
        lower: float = 0.001,
        upper: float = 0.999,
    ) -> PlausibilityBounds:
        """Quantile envelopes of a ground truth pore population."""
        if not metrics:
            raise DataError("Plausibility bounds need at least one pore.")
        return cls(
            statistics.quantile_envelope([m.volume_um3 for m in metrics], lower, upper),
            statistics.quantile_envelope([m.anisotropy for m in metrics], lower, upper),
            statistics.quantile_envelope([m.extent_um for m in metrics], lower, upper),
        )

    def to_json(self) -> dict:
        return {
            "volume_um3": list(self.volume_um3),
            "anisotropy": list(self.anisotropy),
            "extent_um": list(self.extent_um),
        }


def _touches_face(pore: Pore, cube_side: int) -> bool:
    low = np.asarray(pore.bbox_origin)
    high = low + np.asarray(pore.extent)
    return bool(np.any(low <= 0) or np.any(high >= cube_side))


def rejection_reason(
    pore: Pore,
    bounds: PlausibilityBounds | None,
    cube_side: int | None = None,
) -> str | None:
    """
    Name the first plausibility criterion the pore fails.

    :param pore: A binarized pore with its origin in cube coordinates.
    :param bounds: Envelopes to check; None skips the envelope checks.
    :param cube_side: Side of the generating cube; None skips the face
        check.
    :return: Reason or None for an acceptable pore.
    """
    if cube_side is not None and _touches_face(pore, cube_side):
        return "touches cube face"
    if bounds is None:
        return None
    metrics = pore_metrics.metrics_for(pore)
    checks = (
        ("volume", metrics.volume_um3, bounds.volume_um3),
        ("anisotropy", metrics.anisotropy, bounds.anisotropy),
        ("extent", metrics.extent_um, bounds.extent_um),
    )
    for name, value, (low, high) in checks:
        if not low <= value <= high:
            return f"{name} {value:.4g} outside [{low:.4g}, {high:.4g}]"
    return None


def plausibility_filter(
    pore: Pore,
    bounds: PlausibilityBounds | None,
    cube_side: int | None = None,
) -> bool:
    """Whether the pore passes all plausibility criteria."""
    return rejection_reason(pore, bounds, cube_side) is None


@dataclass
class PoreBank:
    """
    Accepted pores with their descriptors.

    :param pores: Pores with bounding box origin zero; the label is the
        bank id.
    :param metrics: Descriptors of every pore.
    :param provenance: ``"generated"`` or ``"ground-truth"``.
    :param seed: Seed the bank was drawn with.
    :param acceptance_rate: Accepted fraction of the drawn cubes.
    :param profile: Profile of the generating network.
    """
    pores: list[Pore] = field(default_factory=list)
    metrics: list[PoreMetrics] = field(default_factory=list)
    provenance: str = "generated"
    seed: int | None = None
    acceptance_rate: float = 1.0
    profile: str | None = None

    def __len__(self) -> int:
        return len(self.pores)

    def features(self) -> NDArray:
        """Matching features (volume, anisotropy, theta_z), shape (n, 3)."""
        rows = [(m.volume_um3, m.anisotropy, m.theta_z) for m in self.metrics]
        return np.array(rows, dtype=np.float64).reshape(-1, 3)

    def add(self, pore: Pore, metrics: PoreMetrics | None = None) -> None:
        bank_id = len(self.pores)
        pore = Pore(pore.voxels, (0, 0, 0), pore.voxel_size, bank_id)
        if metrics is None:
            metrics = pore_metrics.metrics_for(pore)
        self.pores.append(pore)
        self.metrics.append(metrics)


def bank_from_pores(
    pores: Sequence[Pore], provenance: str = "ground-truth"
) -> PoreBank:
    """Bank a population of measured pores as they are."""
    bank = PoreBank(provenance=provenance)
    for pore in pores:
        bank.add(pore)
    return bank


def _screen(
    cube: NDArray,
    bounds: PlausibilityBounds | None,
    voxel_size: float,
) -> Pore | Rejected:
    pore = binarize_pore(cube, voxel_size)
    if not pore:
        return pore
    reason = rejection_reason(pore, bounds, cube.shape[-1])
    return pore if reason is None else Rejected(reason)


def build_bank(
    generator: Generator,
    n: int = constants.BANK_SIZE,
    bounds: PlausibilityBounds | None = None,
    seed: int = 0,
    batch_size: int = 64,
    voxel_size: float = constants.VOXEL_SIZE,
    processes: int = 0,
    profile: str | None = None,
) -> PoreBank:
    """
    Draw latents until ``n`` plausible pores are collected.

    Batch ``b`` draws its latents from a generator seeded with
    ``(seed, b)``; the screening of a batch may run in parallel and is
    merged in batch order.

    :param generator: A trained generator.
    :param n: Number of pores to collect.
    :param bounds: Plausibility envelopes; None accepts every binarized
        pore that does not touch the cube face.
    :param seed: Base seed.
    :param batch_size: Latents per batch.
    :param voxel_size: Voxel edge length in micrometres.
    :param processes: Processes used for screening.
    :param profile: Profile name recorded in the bank.
    :raises AcceptanceTooLow: If less than 1 % of the cubes are accepted
        after ``10 n`` draws.
    :return: The bank with exactly ``n`` pores.
    """
    bank = PoreBank(seed=seed, profile=profile)
    draws = 0
    reasons: dict[str, int] = {}
    screen = functools.partial(_screen, bounds=bounds, voxel_size=voxel_size)
    batch_index = 0
    while len(bank) < n:
        rng = np.random.default_rng([seed, batch_index])
        z = rng.normal(size=(batch_size, generator.latent))
        cubes = training.generate(generator, z)
        outcomes = parallelization.process_data(screen, list(cubes), processes)
        for outcome in outcomes:
            draws += 1
            if isinstance(outcome, Rejected):
                key = outcome.reason.split(" ")[0]
                reasons[key] = reasons.get(key, 0) + 1
            elif len(bank) < n:
                bank.add(outcome)
        batch_index += 1
        rate = len(bank) / draws
        if draws >= 10 * n and rate < 0.01 and len(bank) < n:
            raise AcceptanceTooLow(
                f"Only {len(bank)} of {draws} generated pores passed the "
                f"plausibility filter."
            )
    bank.acceptance_rate = len(bank) / draws if draws else 1.0
    logging.info(
        f"Banked {len(bank)} pores from {draws} draws (acceptance "
        f"{bank.acceptance_rate:.1%}); rejections: {reasons}."
    )
    return bank


def save_bank(bank: PoreBank, directory: str | Path) -> Path:
    """
    Write one volume per pore, a metrics CSV and a manifest.

    :param bank: The bank.
    :param directory: Output directory, created if needed.
    :return: Path to the manifest.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for pore in bank.pores:
        data = np.where(pore.mask(), constants.PORE, constants.SOLID)
        io.save_volume(
            VoxelVolume(data, pore.voxel_size), directory / f"pore_{pore.label:06d}"
        )
    pore_metrics.write_metrics_csv(bank.metrics, directory / METRICS_NAME)
    manifest = {
        "n_pores": len(bank),
        "provenance": bank.provenance,
        "seed": bank.seed,
        "profile": bank.profile,
        "acceptance_rate": bank.acceptance_rate,
    }
    manifest_file = directory / MANIFEST_NAME
    with open(manifest_file, "w") as file:
        json.dump(manifest, file, indent=2)
    logging.info(f"Saved bank of {len(bank)} pores to {directory}.")
    return manifest_file


def load_bank(directory: str | Path) -> PoreBank:
    """
    Load a bank written by :func:`save_bank`.

    :param directory: The bank directory.
    :raises DataError: If the manifest, the volumes and the metrics
        disagree in count.
    :return: The bank.
    """
    directory = Path(directory)
    with open(directory / MANIFEST_NAME, "r") as file:
        manifest = json.load(file)
    table = pore_metrics.read_metrics_csv(directory / METRICS_NAME)
    metrics = pore_metrics.metrics_from_table(table)
    if len(metrics) != manifest["n_pores"]:
        raise DataError(
            f"Bank {directory} lists {manifest['n_pores']} pores but holds "
            f"metrics of {len(metrics)}."
        )
    pores = []
    for bank_id in range(manifest["n_pores"]):
        volume = io.load_volume(directory / f"pore_{bank_id:06d}.json")
        voxels = np.argwhere(volume.pore_mask)
        pores.append(Pore(voxels, (0, 0, 0), volume.voxel_size, bank_id))
    return PoreBank(
        pores,
        metrics,
        manifest["provenance"],
        manifest["seed"],
        manifest["acceptance_rate"],
        manifest["profile"],
    )
