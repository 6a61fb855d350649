"""
Pipeline to validate generated parts against the ground truth.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from typing import TYPE_CHECKING

from library.loading import load_stages
from library.plotting import plot_pores
from library.processing import pore_metrics
from library.validation import reports
from library.voxels import labeling
from pipelines.base import DiagnosticsPipeline

if TYPE_CHECKING:
    from library.processing.pore_metrics import PoreMetrics
    from library.validation.reports import ComparisonReport
    from library.voxels.volume import VoxelVolume


@dataclass
class ValidationPipeline(DiagnosticsPipeline):
    """
    Compare generated parts to the ground truth.

    The input directory is the data home. Ground truth metrics and
    smoothed surface maps are read from the deconstruction stage, the
    ground truth volumes from the ground truth stage. Generated parts
    and their boundary maps are read from the part stage and are
    deconstructed here with the same settings; their metric tables are
    written next to the report.

    :param truth_subdir: Stage directory of the ground truth volumes.
    :param deconstruction_subdir: Stage directory of the deconstructed
        ground truth.
    :param generated_subdir: Stage directory of the generated parts.
    """
    truth_subdir: str = "ground_truth"
    deconstruction_subdir: str = "deconstruction"
    generated_subdir: str = "part"

    def run(self) -> int:
        """
        Build, save and plot the comparison report.

        :raises EmptyDataset: If a stage directory holds no artifacts.
        :return: Exit code.
        """
        self._verify_input(
            self.truth_subdir, self.deconstruction_subdir, self.generated_subdir
        )
        self._create_directories()
        start = time.time()

        # Step 1: ground truth
        deconstructed = self.input_dir / self.deconstruction_subdir
        gt_table = load_stages.load_metric_table(deconstructed)
        gt_surfaces = [s for _, s in load_stages.load_surfaces(deconstructed)]
        gt_volumes = [
            v for _, v in load_stages.load_volumes(self.input_dir / self.truth_subdir)
        ]

        # Step 2: deconstruct the generated parts
        generated = self.input_dir / self.generated_subdir
        gen_parts = load_stages.load_volumes(generated)
        gen_surfaces = [s for _, s in load_stages.load_surfaces(generated)]
        gen_metrics = []
        for name, volume in gen_parts:
            metrics = self._pore_metrics(volume)
            pore_metrics.write_metrics_csv(metrics, self.data_dir / f"{name}_metrics.csv")
            gen_metrics.extend(metrics)
        start = self._diagnostics(start, "deconstruction of generated parts")

        # Step 3: compare
        report = reports.compare(
            gt_table,
            gen_metrics,
            gt_volumes,
            [v for _, v in gen_parts],
            gt_surfaces,
            gen_surfaces,
            J=self.config.synth.J,
            L=self.config.synth.L,
        )
        reports.save_report(report, self.data_dir)
        self._diagnostics(start, "comparison")
        self._write_run_info(**report.summary())
        self._log_report(report)

        # Step 4: figures
        if self.no_plots:
            return 0
        fig, _ = plot_pores.plot_univariate_histograms(report.univariate)
        self._save_fig(fig, "univariate")
        for comparison in report.bivariate:
            fig, _ = plot_pores.plot_pair_contours(comparison)
            self._save_fig(fig, "__".join(comparison.pair), subdir="pairs")
        fig, _ = plot_pores.plot_orthogonal_slices(
            {"ground truth": gt_volumes[0], "generated": gen_parts[0][1]}
        )
        self._save_fig(fig, "slices")
        return 0

    def _pore_metrics(self, volume: VoxelVolume) -> list[PoreMetrics]:
        labeled = labeling.label_components(volume, self.config.connectivity)
        pores = labeling.extract_pores(labeled, self.config.min_pore_voxels)
        return pore_metrics.population_metrics(pores, self.processes)

    @staticmethod
    def _log_report(report: ComparisonReport) -> None:
        for name, comparison in report.univariate.items():
            logging.info(f"KS {name:>12}: {comparison.ks:.3f}")
        for comparison in report.bivariate:
            logging.log(15, f"L1 {' vs '.join(comparison.pair)}: {comparison.l1:.3f}")
        for row in report.precision:
            logging.info(
                f"View {row.view}: P = {row.precision_gt:.4g}, "
                f"P_hat = {row.precision_gen:.4g}, S = {row.separation:.4g}"
            )
