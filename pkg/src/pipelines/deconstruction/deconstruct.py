"""
Pipeline to deconstruct part volumes into pores and boundary maps.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from typing import TYPE_CHECKING, ClassVar

from library.exceptions import PoreTooLarge
from library.gan import pore_archive
from library.loading import load_stages
from library.plotting import plot_surfaces
from library.processing import pore_metrics
from library.surface import filtering
from library.surface import io as surface_io
from library.surface import surface_map
from library.voxels import labeling
from pipelines.base import DiagnosticsPipeline

if TYPE_CHECKING:
    from library.surface.surface_map import SurfaceMap
    from library.voxels.volume import Pore, VoxelVolume


@dataclass
class DeconstructPipeline(DiagnosticsPipeline):
    """
    Split every part of the input directory into its constituents.

    For every part volume, the pipeline writes

    - ``<part>_metrics.csv``: the metrics of all pores,
    - ``<part>_surface``: the smoothed surface map (plus PNG preview),
    - ``unrolled/<part>_surface``: the surface map before smoothing,

    and for all parts together the archive ``cubes.h5`` of centred pore
    cubes for GAN training. Pores larger than the training cube are
    kept in the metrics but left out of the archive.
    """

    UNROLLED_DIR: ClassVar[str] = "unrolled"
    ARCHIVE_NAME: ClassVar[str] = "cubes.h5"

    def run(self) -> int:
        """
        Deconstruct all parts.

        :raises EmptyDataset: If the input directory holds no volume.
        :return: Exit code.
        """
        self._verify_input()
        self._create_directories([self.UNROLLED_DIR])
        start = time.time()
        volumes = load_stages.load_volumes(self.input_dir)

        cubes, sources, n_pores = [], [], 0
        for index, (name, volume) in enumerate(volumes):
            pores = self._deconstruct_part(name, volume)
            n_pores += len(pores)
            part_cubes = self._training_cubes(pores)
            cubes.extend(part_cubes)
            sources.extend([index] * len(part_cubes))
            start = self._diagnostics(start, f"deconstruction of {name}")

        pore_archive.write_cubes(
            self.data_dir / self.ARCHIVE_NAME,
            cubes,
            sources,
            self.config.voxel_size,
        )
        self._write_run_info(
            parts=[name for name, _ in volumes], n_pores=n_pores, n_cubes=len(cubes)
        )
        logging.info(
            f"Deconstructed {len(volumes)} parts into {n_pores} pores, "
            f"{len(cubes)} of which fit the {self.config.cube_side}^3 cube."
        )
        return 0

    def _deconstruct_part(self, name: str, volume: VoxelVolume) -> list[Pore]:
        """Write metrics and surface maps of one part and return its pores."""
        labeled = labeling.label_components(volume, self.config.connectivity)
        pores = labeling.extract_pores(labeled, self.config.min_pore_voxels)
        metrics = pore_metrics.population_metrics(pores, self.processes)
        pore_metrics.write_metrics_csv(metrics, self.data_dir / f"{name}_metrics.csv")

        unrolled = surface_map.unroll(volume, self.config.n_theta)
        smoothed = filtering.savgol(
            unrolled, self.config.savgol_window_um, self.config.savgol_order
        )
        surface_io.save_surface(
            unrolled, self.data_dir / self.UNROLLED_DIR / f"{name}_surface"
        )
        surface_io.save_surface(smoothed, self.data_dir / f"{name}_surface")
        logging.info(
            f"Part {name}: {len(pores)} pores, nominal radius "
            f"{unrolled.nominal_radius:.1f} um."
        )
        self._plot_part(name, unrolled, smoothed)
        return pores

    def _training_cubes(self, pores: list[Pore]) -> list[VoxelVolume]:
        cubes = []
        for pore in pores:
            try:
                cubes.append(labeling.center_in_cube(pore, self.config.cube_side))
            except PoreTooLarge as exc:
                logging.debug(f"Pore {pore.label} left out of the archive: {exc}")
        return cubes

    def _plot_part(self, name: str, unrolled: SurfaceMap, smoothed: SurfaceMap) -> None:
        if self.no_plots:
            return
        surface_io.save_preview(smoothed, self.data_dir / f"{name}_surface.png")
        fig, _ = plot_surfaces.plot_surface_maps(
            {"unrolled": unrolled, "smoothed": smoothed}
        )
        self._save_fig(fig, f"{name}_surface")
