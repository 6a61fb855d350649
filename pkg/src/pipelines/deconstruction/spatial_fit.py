"""
Pipelines to fit the spatial pore model and to study its bin count.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, ClassVar, Sequence

import numpy as np

from library.data_acquisition import synthetic_parts
from library.exceptions import DataError
from library.loading import load_stages
from library.plotting import plot_pores
from library.processing import pore_metrics
from library.spatial import model as spatial_model
from library.spatial.model import PartGeometry
from pipelines.base import Pipeline

if TYPE_CHECKING:
    from library.processing.pore_metrics import PoreMetrics

MODEL_NAME = "spatial_model.json"


def load_populations(
    directory: str | Path,
) -> list[tuple[list[PoreMetrics], PartGeometry]]:
    """
    Load the pore metrics and geometry of every deconstructed part.

    Parts are identified by their smoothed surface maps; each needs a
    matching ``<part>_metrics.csv`` next to it.

    :param directory: Output directory of the deconstruction.
    :raises EmptyDataset: If the directory holds no surface map.
    :raises DataError: If a metric table is missing.
    :return: One tuple of metrics and geometry per part.
    """
    directory = Path(directory)
    populations = []
    for stem, surface in load_stages.load_surfaces(directory):
        part = stem.removesuffix("_surface")
        metrics_file = directory / f"{part}_metrics.csv"
        if not metrics_file.exists():
            raise DataError(f"Missing pore metrics {metrics_file} of part {part}.")
        table = pore_metrics.read_metrics_csv(metrics_file)
        populations.append(
            (pore_metrics.metrics_from_table(table), PartGeometry.from_surface(surface))
        )
    return populations


@dataclass
class FitSpatialModelPipeline(Pipeline):
    """
    Fit the binned spatial model to all deconstructed parts.

    The pores of all parts are pooled onto a common axis, so the fitted
    rates are rates per unit length of the pooled parts.
    """

    def run(self) -> int:
        """
        Fit and save the model.

        :raises NoPores: If the parts contain no pores at all.
        :return: Exit code.
        """
        self._verify_input()
        self._create_directories()
        populations = load_populations(self.input_dir)
        metrics, geometry = spatial_model.pool_populations(populations)
        logging.info(
            f"Fitting {len(metrics)} pores of {len(populations)} parts with "
            f"N_b = {self.config.n_bins}."
        )
        model = spatial_model.fit(metrics, geometry, self.config.n_bins)
        spatial_model.save_model(model, self.data_dir / MODEL_NAME)
        self._write_run_info(n_parts=len(populations), n_pores=len(metrics))

        if not self.no_plots:
            fig, _ = plot_pores.plot_density_map(
                spatial_model.rasterize_density(model),
                model.geometry,
                f"$N_b = {model.n_bins}$",
            )
            self._save_fig(fig, "density")
        return 0


@dataclass
class BinAblationPipeline(Pipeline):
    """
    Compare fitted density maps for several bin counts to the truth.

    Requires synthetic ground truth: the generating density law is read
    from the manifest in ``ground_truth_dir``. For every bin count, the
    fitted density is rasterized on the grid of the generating law and
    the L1 distance of both normalized rasters is written to
    ``bin_ablation.csv``.

    :param ground_truth_dir: Directory of the synthetic parts; defaults
        to the ``ground_truth`` stage directory under the data home.
    :param bin_counts: The values of N_b to compare.
    """
    ground_truth_dir: Path | None = None
    bin_counts: Sequence[int] = (5, 20, 30, 100)

    TABLE_NAME: ClassVar[str] = "bin_ablation.csv"
    GRID_SIDE: ClassVar[int] = 300

    def run(self) -> int:
        """
        Run the ablation.

        :raises DataError: If the ground truth manifest is missing.
        :return: Exit code.
        """
        self._verify_input()
        self._create_directories()
        truth_dir = self.ground_truth_dir or self.config.data_home / "ground_truth"
        manifest_file = Path(truth_dir) / synthetic_parts.MANIFEST_NAME
        if not manifest_file.exists():
            raise DataError(
                f"Bin ablation needs the ground truth manifest {manifest_file}."
            )
        truth = synthetic_parts.load_manifest(truth_dir)["config"]

        metrics, geometry = spatial_model.pool_populations(
            load_populations(self.input_dir)
        )
        reference = synthetic_parts.radial_density_raster(
            geometry,
            truth["density_gradient"],
            truth["pore_radius_fraction"],
            self.GRID_SIDE,
        )
        rows = []
        for n_bins in self.bin_counts:
            model = spatial_model.fit(metrics, geometry, n_bins)
            raster = spatial_model.rasterize_density(model, self.GRID_SIDE)
            distance = spatial_model.density_l1(raster, reference)
            logging.info(f"N_b = {n_bins:>3}: density L1 = {distance:.4f}")
            rows.append((n_bins, distance))
            if not self.no_plots:
                fig, _ = plot_pores.plot_density_map(
                    raster, geometry, f"$N_b = {n_bins}$, L1 = {distance:.3f}"
                )
                self._save_fig(fig, f"nb{n_bins}", subdir="ablation")

        np.savetxt(
            self.data_dir / self.TABLE_NAME,
            np.asarray(rows, dtype=np.float64).reshape(-1, 2),
            delimiter=",",
            header="n_bins,l1",
            comments="",
            fmt=["%d", "%.8g"],
        )
        self._write_run_info(bin_counts=list(self.bin_counts), l1=[d for _, d in rows])
        if not self.no_plots:
            fig, _ = plot_pores.plot_density_map(reference, geometry, "generating law")
            self._save_fig(fig, "truth", subdir="ablation")
        return 0
