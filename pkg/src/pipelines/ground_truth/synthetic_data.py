"""
Pipeline to generate the synthetic ground truth parts.
"""
from __future__ import annotations

import functools
import logging
import time
from dataclasses import dataclass

from library.data_acquisition import synthetic_parts
from library.plotting import plot_pores, plot_surfaces
from library.processing import parallelization
from library.spatial.model import PartGeometry
from pipelines.base import Pipeline


@dataclass
class SyntheticDataPipeline(Pipeline):
    """
    Generate rough porous parts with known generating parameters.

    Parts are written to the data directory together with a manifest of
    the true pore parameters. Figures show the central slices and the
    boundary map of the first part and the generating density law.
    """

    def run(self) -> int:
        """
        Generate and save the parts.

        :raises MissingSeedError: If no seed is configured.
        :return: Exit code.
        """
        seed = self.config.require_seed("synth-data")
        settings = self.config.synthetic
        self._create_directories()
        start = time.time()

        # Step 1: generate the parts
        generate = functools.partial(
            synthetic_parts.generate_part, settings, seed=seed
        )
        parts = parallelization.process_data(
            generate, list(range(settings.n_parts)), self.processes
        )
        start = self._timeit(start, "generating synthetic parts")

        # Step 2: save parts and manifest
        synthetic_parts.save_parts(parts, settings, self.data_dir)
        self._write_run_info(seed=seed, n_pores=[len(p.pores) for p in parts])

        # Step 3: quick-look figures
        if self.no_plots:
            return 0
        fig, _ = plot_pores.plot_orthogonal_slices(
            {f"part {i}": part.volume for i, part in enumerate(parts[:2])}
        )
        self._save_fig(fig, "slices")
        fig, _ = plot_surfaces.plot_surface_maps({"boundary": parts[0].surface})
        self._save_fig(fig, "surface")
        geometry: PartGeometry = settings.geometry
        raster = synthetic_parts.radial_density_raster(
            geometry, settings.density_gradient, settings.pore_radius_fraction
        )
        fig, _ = plot_pores.plot_density_map(raster, geometry, "generating density")
        self._save_fig(fig, "density")
        logging.info("Saved ground truth quick-look figures.")
        return 0
