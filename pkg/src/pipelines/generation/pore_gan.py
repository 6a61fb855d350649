"""
Pipeline to train the pore GAN and fill a pore bank.
"""
from __future__ import annotations

import dataclasses
import json
import logging
import time
from dataclasses import dataclass
from typing import ClassVar

import numpy as np

from library import constants
from library.gan import bank as pore_bank
from library.gan import pore_archive, training
from library.loading import load_stages
from library.plotting import common, plot_pores
from library.processing import pore_metrics
from library.voxels.volume import VoxelVolume
from pipelines.base import DiagnosticsPipeline
from pipelines.deconstruction.deconstruct import DeconstructPipeline


@dataclass
class TrainPoreGANPipeline(DiagnosticsPipeline):
    """
    Train the GAN on the archived training cubes and bank its pores.

    The input directory is the deconstruction output; it must hold the
    cube archive and the metric tables of the ground truth parts, from
    which the plausibility envelopes of the bank are taken. Checkpoints
    are written as ``pore_gan_generator`` and ``pore_gan_discriminator``,
    the bank to the ``bank`` subdirectory.
    """

    CHECKPOINT_STEM: ClassVar[str] = "pore_gan"
    BANK_DIR: ClassVar[str] = "bank"

    def run(self) -> int:
        """
        Train, then generate the bank.

        :raises MissingSeedError: If no seed is configured.
        :raises Diverged: If a training loss becomes non-finite.
        :raises AcceptanceTooLow: If the generator rarely yields
            plausible pores.
        :return: Exit code.
        """
        seed = self.config.require_seed("train-gan")
        self._verify_input(DeconstructPipeline.ARCHIVE_NAME)
        self._create_directories()
        start = time.time()

        # Step 1: load training cubes and ground truth metrics
        cubes, _, voxel_size = pore_archive.read_cubes(
            self.input_dir / DeconstructPipeline.ARCHIVE_NAME
        )
        table = load_stages.load_metric_table(self.input_dir)
        bounds = pore_bank.PlausibilityBounds.from_population(
            pore_metrics.metrics_from_table(table)
        )
        logging.info(f"Training on {len(cubes)} cubes of side {cubes.shape[-1]}.")

        # Step 2: train
        train_config = dataclasses.replace(self.config.gan, seed=seed)
        result = training.train(cubes, train_config)
        training.save_networks(result, self.data_dir / self.CHECKPOINT_STEM)
        start = self._diagnostics(start, "GAN training")

        # Step 3: fill the bank
        bank = pore_bank.build_bank(
            result.generator,
            self.config.bank_size,
            bounds,
            seed=seed,
            voxel_size=voxel_size,
            processes=self.processes,
            profile=train_config.profile,
        )
        pore_bank.save_bank(bank, self.data_dir / self.BANK_DIR)
        with open(self.data_dir / self.BANK_DIR / "bounds.json", "w") as file:
            json.dump(bounds.to_json(), file, indent=2)
        self._diagnostics(start, "bank generation")
        self._write_run_info(
            seed=seed,
            n_cubes=len(cubes),
            acceptance_rate=bank.acceptance_rate,
            final_d_loss=result.d_losses[-1],
            final_g_loss=result.g_losses[-1],
        )

        if not self.no_plots:
            fig, _ = common.plot_loss_curves(
                {"discriminator": result.d_losses, "generator": result.g_losses}
            )
            self._save_fig(fig, "losses")
            examples = {
                f"bank pore {pore.label}": VoxelVolume(
                    np.where(pore.mask(), constants.PORE, constants.SOLID).astype(np.uint8),
                    pore.voxel_size,
                )
                for pore in bank.pores[:3]
            }
            fig, _ = plot_pores.plot_orthogonal_slices(examples)
            self._save_fig(fig, "bank_slices")
        return 0
