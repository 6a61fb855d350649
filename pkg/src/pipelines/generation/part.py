"""
Pipeline to assemble synthetic part realizations.
"""
from __future__ import annotations

import logging
import time
from collections import Counter
from dataclasses import dataclass

from library.assembly import placement, window
from library.gan import bank as pore_bank
from library.loading import load_stages
from library.plotting import plot_pores
from library.spatial import model as spatial_model
from library.surface import io as surface_io
from library.voxels import io as volume_io
from pipelines.base import DiagnosticsPipeline
from pipelines.deconstruction.spatial_fit import MODEL_NAME


@dataclass
class AssemblePartPipeline(DiagnosticsPipeline):
    """
    Assemble one part per synthesized surface map.

    The input directory is the data home; the spatial model, the pore
    bank and the synthesized maps are read from the stage directories
    below it. Part ``i`` is assembled with seed ``seed + i`` and
    written as volume ``<part>`` with its ledger ``<part>_ledger.csv``
    and a copy of its boundary map ``<part>_surface``.

    :param model_subdir: Stage directory holding the spatial model.
    :param bank_subdir: Directory of the pore bank.
    :param surface_subdir: Stage directory of the synthesized maps.
    :param windowed: Whether to assemble with the moving window.
    """
    model_subdir: str = "spatial"
    bank_subdir: str = "gan/bank"
    surface_subdir: str = "surface"
    windowed: bool = True

    def run(self) -> int:
        """
        Assemble and save all parts.

        :raises MissingSeedError: If no seed is configured.
        :raises InvalidConfigPathError: If a required input is missing.
        :return: Exit code.
        """
        seed = self.config.require_seed("gen-part")
        model_file = f"{self.model_subdir}/{MODEL_NAME}"
        bank_manifest = f"{self.bank_subdir}/{pore_bank.MANIFEST_NAME}"
        self._verify_input(model_file, bank_manifest, self.surface_subdir)
        self._create_directories()
        start = time.time()

        model = spatial_model.load_model(self.input_dir / model_file)
        bank = pore_bank.load_bank(self.input_dir / self.bank_subdir)
        surfaces = load_stages.load_surfaces(self.input_dir / self.surface_subdir)
        start = self._timeit(start, "loading the generative models")

        summary = {}
        for index, (stem, surface) in enumerate(surfaces):
            name = stem.removesuffix("_surface")
            part = window.assemble_part(
                model,
                bank,
                surface,
                voxel_size=self.config.voxel_size,
                window_dz=self.config.window_dz,
                seed=seed + index,
                windowed=self.windowed,
                retries=self.config.placement_retries,
            )
            volume = part.volume()
            volume_io.save_volume(volume, self.data_dir / name)
            surface_io.save_surface(surface, self.data_dir / f"{name}_surface")
            placement.write_ledger_csv(part, self.data_dir / f"{name}_ledger.csv")
            summary[name] = dict(Counter(entry.status for entry in part.ledger))
            logging.info(f"Part {name}: ledger {summary[name]}.")
            if not self.no_plots:
                fig, _ = plot_pores.plot_orthogonal_slices({name: volume})
                self._save_fig(fig, f"{name}_slices")
                fig, _ = plot_pores.plot_phase_fractions(volume)
                self._save_fig(fig, f"{name}_porosity")
            start = self._diagnostics(start, f"assembly of {name}")

        self._write_run_info(seed=seed, windowed=self.windowed, ledgers=summary)
        return 0
