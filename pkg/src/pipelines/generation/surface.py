"""
Pipeline to synthesize surface roughness maps.
"""
from __future__ import annotations

import dataclasses
import json
import logging
import time
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from library.loading import load_stages
from library.plotting import common, plot_scattering, plot_surfaces
from library.scattering import export, filters
from library.scattering import statistics as mst_statistics
from library.scattering.transform import scatter2d
from library.surface import filtering
from library.surface import io as surface_io
from library.synthesis import microcanonical
from pipelines.base import DiagnosticsPipeline

if TYPE_CHECKING:
    from numpy.typing import NDArray

    from library.scattering.filters import FilterBank
    from library.surface.surface_map import SurfaceMap
    from library.synthesis.microcanonical import SynthConfig, SynthRun


@dataclass
class SurfaceSynthesisPipeline(DiagnosticsPipeline):
    """
    Synthesize one new surface map per measured map.

    Every smoothed map of the input directory serves as target of one
    microcanonical synthesis run seeded with ``seed + index``. The
    result is smoothed and saved as ``<part>_surface`` together with

    - ``<part>_synthesis.json``: loss trace and ensemble offsets,
    - ``<part>_rose_target.csv`` and ``<part>_rose_synthesized.csv``:
      first-order means for rose plots,
    - ``<part>_coefficients.csv``: synthesized log coefficients against
      the band of the target's translation ensemble.
    """

    def run(self) -> int:
        """
        Synthesize all maps.

        :raises MissingSeedError: If no seed is configured.
        :raises Diverged: If a synthesis loss becomes non-finite.
        :return: Exit code.
        """
        seed = self.config.require_seed("gen-surface")
        self._verify_input()
        self._create_directories()
        targets = load_stages.load_surfaces(self.input_dir)
        base = self.config.synth
        bank = filters.build_filter_bank(base.J, base.L, base.image_side)
        logging.info(
            f"Synthesizing {len(targets)} surfaces at {base.image_side}^2 "
            f"with G = {base.G}, J = {base.J}, L = {base.L}."
        )

        inside = {}
        start = time.time()
        for index, (stem, target) in enumerate(targets):
            part = stem.removesuffix("_surface")
            synth_config = dataclasses.replace(base, seed=seed + index)
            synthesized, run = microcanonical.synthesize(target, synth_config, bank=bank)
            synthesized = microcanonical.postprocess(
                synthesized, self.config.savgol_window_um, self.config.savgol_order
            )
            surface_io.save_surface(synthesized, self.data_dir / f"{part}_surface")
            with open(self.data_dir / f"{part}_synthesis.json", "w") as file:
                json.dump(run.to_json(), file)
            inside[part] = self._export_coefficients(part, target, run, synth_config, bank)
            self._plot_run(part, target, synthesized, run)
            start = self._diagnostics(start, f"synthesis of {part}")

        self._write_run_info(seed=seed, inside_band=inside)
        return 0

    def _export_coefficients(
        self,
        part: str,
        target: SurfaceMap,
        run: SynthRun,
        synth_config: SynthConfig,
        bank: FilterBank,
    ) -> float:
        """Write rose and band comparison tables; return the inside fraction."""
        side = synth_config.image_side
        target_image = filtering.demean(filtering.resize(target, (side, side))).values
        target_coeffs = scatter2d(target_image, bank)
        synth_coeffs = scatter2d(run.image, bank)
        export.write_rose_csv(
            target_coeffs, bank, self.data_dir / f"{part}_rose_target.csv"
        )
        export.write_rose_csv(
            synth_coeffs, bank, self.data_dir / f"{part}_rose_synthesized.csv"
        )
        ensemble = self._ensemble_vectors(target_image, synth_config, bank)
        synthesized = mst_statistics.log_coeffs(synth_coeffs, synth_config.log_floor)
        fraction = export.write_comparison_csv(
            ensemble, synthesized, bank, self.data_dir / f"{part}_coefficients.csv"
        )
        if not self.no_plots:
            fig, _ = plot_scattering.plot_rose(
                {
                    "target": export.rose_rows(target_coeffs, bank),
                    "synthesized": export.rose_rows(synth_coeffs, bank),
                }
            )
            self._save_fig(fig, f"{part}_rose")
            fig, _ = plot_scattering.plot_coefficient_band(
                export.comparison_rows(ensemble, synthesized, bank)
            )
            self._save_fig(fig, f"{part}_band")
        return fraction

    @staticmethod
    def _ensemble_vectors(
        image: NDArray, synth_config: SynthConfig, bank: FilterBank
    ) -> NDArray:
        """Log coefficient vectors of the target's translation ensemble."""
        members = microcanonical.make_ensemble(image, synth_config.G, synth_config.seed)
        return np.array(
            [
                mst_statistics.log_coeffs(scatter2d(m, bank), synth_config.log_floor)
                for m in members
            ]
        )

    def _plot_run(
        self, part: str, target: SurfaceMap, synthesized: SurfaceMap, run: SynthRun
    ) -> None:
        if self.no_plots:
            return
        surface_io.save_preview(synthesized, self.data_dir / f"{part}_surface.png")
        fig, _ = plot_surfaces.plot_surface_maps(
            {"target": target, "synthesized": synthesized}
        )
        self._save_fig(fig, f"{part}_maps")
        fig, _ = common.plot_loss_curves(
            {"loss": run.loss_trace},
            xlabel="Iteration",
            log=True,
            running_minimum=True,
        )
        self._save_fig(fig, f"{part}_loss")
