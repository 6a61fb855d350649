"""
Comparison of generated part realizations against the ground truth.
"""
from __future__ import annotations

import functools
import itertools
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Mapping, Sequence

import numpy as np

from library import constants
from library.exceptions import ConfigError
from library.processing import pore_metrics, statistics
from library.scattering import statistics as mst_statistics
from library.scattering.filters import build_filter_bank
from library.scattering.transform import scatter2d
from library.surface.filtering import resize

if TYPE_CHECKING:
    from numpy.typing import NDArray

    from library.processing.pore_metrics import PoreMetrics
    from library.scattering.filters import FilterBank
    from library.scattering.transform import ScatteringCoeffs
    from library.surface.surface_map import SurfaceMap
    from library.voxels.volume import VoxelVolume

AXES = {"x": 0, "y": 1, "z": 2}

MetricTable = Mapping[str, "NDArray"]


@dataclass(frozen=True, eq=False)
class UnivariateComparison:
    """
    Distributions of one metric in both populations.

    :param name: The metric.
    :param ks: Two-sample KS statistic.
    :param edges: Common bin edges.
    :param gt_hist: Normalized ground truth histogram.
    :param gen_hist: Normalized histogram of the generated pores.
    """
    name: str
    ks: float
    edges: NDArray
    gt_hist: NDArray
    gen_hist: NDArray


@dataclass(frozen=True, eq=False)
class BivariateComparison:
    """
    Joint distribution of a pair of metrics in both populations.

    :param pair: Names of the metric on the first and second axis.
    :param x_edges: Bin edges of the first metric.
    :param y_edges: Bin edges of the second metric.
    :param gt_hist: Normalized 2D ground truth histogram.
    :param gen_hist: Normalized 2D histogram of the generated pores.
    :param l1: L1 distance of the two histograms, in [0, 2].
    :param levels: Contour levels of the ground truth histogram.
    """
    pair: tuple[str, str]
    x_edges: NDArray
    y_edges: NDArray
    gt_hist: NDArray
    gen_hist: NDArray
    l1: float
    levels: NDArray


@dataclass(frozen=True)
class PrecisionRow:
    """Precision of both ensembles and their separation for one view."""
    view: str
    precision_gt: float
    precision_gen: float
    separation: float

    @property
    def ratio(self) -> float:
        """S / (P + P_hat); tends to one for indistinguishable ensembles."""
        total = self.precision_gt + self.precision_gen
        return self.separation / total if total > 0 else float("nan")


@dataclass
class ComparisonReport:
    """
    All quantities of one ground truth vs generated comparison.

    :param univariate: Per-metric comparisons, keyed by metric name.
    :param bivariate: Per-pair comparisons.
    :param precision: Rows of the precision/separation table.
    :param reliable_fraction: Fraction of pores below the reliable CT
        volume, keyed by ``"gt"`` and ``"gen"``.
    :param n_pores: Number of pores, keyed by ``"gt"`` and ``"gen"``.
    """
    univariate: dict[str, UnivariateComparison] = field(default_factory=dict)
    bivariate: list[BivariateComparison] = field(default_factory=list)
    precision: list[PrecisionRow] = field(default_factory=list)
    reliable_fraction: dict[str, float] = field(default_factory=dict)
    n_pores: dict[str, int] = field(default_factory=dict)

    def summary(self) -> dict:
        """All scalar results as a JSON-serializable dictionary."""
        return {
            "n_pores": self.n_pores,
            "reliable_fraction": self.reliable_fraction,
            "ks": {name: c.ks for name, c in self.univariate.items()},
            "l1": {"__".join(c.pair): c.l1 for c in self.bivariate},
            "precision": [
                {
                    "view": row.view,
                    "P": row.precision_gt,
                    "P_hat": row.precision_gen,
                    "S": row.separation,
                }
                for row in self.precision
            ],
        }


def as_table(metrics: Sequence[PoreMetrics] | MetricTable) -> MetricTable:
    """Accept either a metric list or a column table."""
    if isinstance(metrics, Mapping):
        return metrics
    return pore_metrics.metrics_table(metrics)


def _column(table: MetricTable, name: str) -> NDArray:
    try:
        return np.asarray(table[name], dtype=np.float64)
    except KeyError:
        raise ConfigError(f"Unknown metric {name!r}.") from None


def univariate_report(
    gt: Sequence[PoreMetrics] | MetricTable,
    gen: Sequence[PoreMetrics] | MetricTable,
    names: Sequence[str] = constants.METRIC_NAMES,
    bins: int = constants.UNIVARIATE_BINS,
) -> dict[str, UnivariateComparison]:
    """
    Compare the marginal distribution of every metric.

    :param gt: Ground truth metrics.
    :param gen: Metrics of the generated pores.
    :param names: Metric columns to compare.
    :param bins: Number of histogram bins.
    :return: Comparisons keyed by metric name, in ``names`` order.
    """
    gt, gen = as_table(gt), as_table(gen)
    report = {}
    for name in names:
        first, second = _column(gt, name), _column(gen, name)
        edges, gt_hist, gen_hist = statistics.aligned_histograms(first, second, bins)
        report[name] = UnivariateComparison(
            name, statistics.ks_distance(first, second), edges, gt_hist, gen_hist
        )
        logging.debug(f"KS distance of {name}: {report[name].ks:.4f}")
    return report


def bivariate_report(
    gt: Sequence[PoreMetrics] | MetricTable,
    gen: Sequence[PoreMetrics] | MetricTable,
    pairs: Sequence[tuple[str, str]] | None = None,
    bins: int = constants.BIVARIATE_BINS,
) -> list[BivariateComparison]:
    """
    Compare joint distributions of metric pairs.

    :param gt: Ground truth metrics.
    :param gen: Metrics of the generated pores.
    :param pairs: Metric pairs; all pairs of the six standard metrics
        if None.
    :param bins: Bins per axis.
    :return: One comparison per pair.
    """
    gt, gen = as_table(gt), as_table(gen)
    if pairs is None:
        pairs = list(itertools.combinations(constants.METRIC_NAMES, 2))
    report = []
    for first, second in pairs:
        x_gt, y_gt = _column(gt, first), _column(gt, second)
        x_gen, y_gen = _column(gen, first), _column(gen, second)
        x_range = statistics.common_range(x_gt, x_gen)
        y_range = statistics.common_range(y_gt, y_gen)
        gt_hist = statistics.normalized_histogram2d(x_gt, y_gt, bins, x_range, y_range)
        gen_hist = statistics.normalized_histogram2d(x_gen, y_gen, bins, x_range, y_range)
        report.append(
            BivariateComparison(
                (first, second),
                np.linspace(*x_range, bins + 1),
                np.linspace(*y_range, bins + 1),
                gt_hist,
                gen_hist,
                statistics.l1_distance(gt_hist, gen_hist),
                statistics.contour_levels(gt_hist),
            )
        )
    return report


def reliable_fraction(metrics: Sequence[PoreMetrics] | MetricTable) -> float:
    """Fraction of pores below the reliably detectable CT volume."""
    volumes = _column(as_table(metrics), "volume_um3")
    if len(volumes) == 0:
        return 0.0
    return float(np.mean(volumes < constants.RELIABLE_VOLUME_UM3))


def _padded_side(shape: tuple[int, ...], minimum: int) -> int:
    return max(minimum, 1 << (int(max(shape)) - 1).bit_length())


def projection_image(
    volume: VoxelVolume, axis: str, minimum_side: int = 2**constants.SCATTERING_J
) -> NDArray:
    """
    Project the pore phase of a part onto a plane.

    Pore occupancy is summed along ``axis``, scaled to [0, 1] and
    zero-padded into the centre of a square of power-of-two side.

    :param volume: The part volume.
    :param axis: ``"x"``, ``"y"`` or ``"z"``.
    :param minimum_side: Smallest side of the padded image.
    :raises ConfigError: If the axis is unknown.
    :return: Square image.
    """
    if axis not in AXES:
        raise ConfigError(f"Unknown projection axis {axis!r}.")
    projection = volume.pore_mask.sum(axis=AXES[axis]).astype(np.float64)
    peak = projection.max(initial=0.0)
    if peak > 0:
        projection /= peak
    side = _padded_side(projection.shape, minimum_side)
    image = np.zeros((side, side))
    low = [(side - n) // 2 for n in projection.shape]
    image[low[0]:low[0] + projection.shape[0], low[1]:low[1] + projection.shape[1]] = projection
    return image


@functools.lru_cache(maxsize=16)
def _filter_bank(J: int, L: int, side: int) -> FilterBank:
    return build_filter_bank(J, L, side)


def projection_mst(
    volume: VoxelVolume,
    axis: str,
    J: int = constants.SCATTERING_J,
    L: int = constants.SCATTERING_L,
) -> ScatteringCoeffs:
    """
    Scattering coefficients of a pore projection.

    :param volume: The part volume.
    :param axis: Projection axis.
    :param J: Number of scales.
    :param L: Number of rotations.
    :return: The coefficients of the padded projection.
    """
    image = projection_image(volume, axis, 2**J)
    return scatter2d(image, _filter_bank(J, L, len(image)))


def surface_mst(
    surface: SurfaceMap,
    J: int = constants.SCATTERING_J,
    L: int = constants.SCATTERING_L,
    side: int = constants.SURFACE_IMAGE_SIDE,
) -> ScatteringCoeffs:
    """Scattering coefficients of a surface map resampled to a square."""
    image = resize(surface, (side, side)).values
    return scatter2d(image, _filter_bank(J, L, side))


def _precision_or_nan(vectors: NDArray, view: str, label: str) -> float:
    if len(vectors) < 2:
        logging.warning(
            f"Precision of the {label} {view} ensemble needs at least two "
            f"members, got {len(vectors)}."
        )
        return float("nan")
    return mst_statistics.precision(vectors)


def precision_separation_table(
    gt_vectors: Mapping[str, Sequence[NDArray]],
    gen_vectors: Mapping[str, Sequence[NDArray]],
) -> list[PrecisionRow]:
    """
    Precision and separation of log-scattering ensembles per view.

    :param gt_vectors: Log coefficient vectors of the ground truth,
        keyed by view (projection axis or ``"surface"``).
    :param gen_vectors: Log coefficient vectors of the generated parts,
        with the same keys.
    :raises ConfigError: If the views differ.
    :return: One row per view, in the order of ``gt_vectors``.
    """
    if set(gt_vectors) != set(gen_vectors):
        raise ConfigError(
            f"Views differ: {sorted(gt_vectors)} vs {sorted(gen_vectors)}."
        )
    rows = []
    for view, gt in gt_vectors.items():
        gt = np.asarray(gt, dtype=np.float64)
        gen = np.asarray(gen_vectors[view], dtype=np.float64)
        rows.append(
            PrecisionRow(
                view,
                _precision_or_nan(gt, view, "ground truth"),
                _precision_or_nan(gen, view, "generated"),
                mst_statistics.separation(gt, gen),
            )
        )
    return rows


def log_vectors(
    volumes: Sequence[VoxelVolume] = (),
    surfaces: Sequence[SurfaceMap] = (),
    axes: Sequence[str] = ("x", "y", "z"),
    J: int = constants.SCATTERING_J,
    L: int = constants.SCATTERING_L,
) -> dict[str, list[NDArray]]:
    """Log-scattering vectors of projections and surfaces, keyed by view."""
    vectors = {}
    if volumes:
        for axis in axes:
            vectors[axis] = [
                mst_statistics.log_coeffs(projection_mst(v, axis, J, L)) for v in volumes
            ]
    if surfaces:
        vectors["surface"] = [
            mst_statistics.log_coeffs(surface_mst(s, J, L)) for s in surfaces
        ]
    return vectors


def compare(
    gt: Sequence[PoreMetrics] | MetricTable,
    gen: Sequence[PoreMetrics] | MetricTable,
    gt_volumes: Sequence[VoxelVolume] = (),
    gen_volumes: Sequence[VoxelVolume] = (),
    gt_surfaces: Sequence[SurfaceMap] = (),
    gen_surfaces: Sequence[SurfaceMap] = (),
    J: int = constants.SCATTERING_J,
    L: int = constants.SCATTERING_L,
) -> ComparisonReport:
    """
    Build the complete comparison report.

    Projection rows need volumes on both sides and surface rows need
    surfaces on both sides; otherwise they are left out.

    :return: The report.
    """
    gt, gen = as_table(gt), as_table(gen)
    report = ComparisonReport(
        univariate=univariate_report(gt, gen),
        bivariate=bivariate_report(gt, gen),
        reliable_fraction={"gt": reliable_fraction(gt), "gen": reliable_fraction(gen)},
        n_pores={"gt": len(gt["volume_um3"]), "gen": len(gen["volume_um3"])},
    )
    volumes = (gt_volumes, gen_volumes) if gt_volumes and gen_volumes else ((), ())
    surfaces = (gt_surfaces, gen_surfaces) if gt_surfaces and gen_surfaces else ((), ())
    gt_vectors = log_vectors(volumes[0], surfaces[0], J=J, L=L)
    gen_vectors = log_vectors(volumes[1], surfaces[1], J=J, L=L)
    if gt_vectors:
        report.precision = precision_separation_table(gt_vectors, gen_vectors)
    worst = max(report.univariate.values(), key=lambda c: c.ks)
    logging.info(
        f"Compared {report.n_pores['gt']} ground truth with "
        f"{report.n_pores['gen']} generated pores; largest KS distance "
        f"{worst.ks:.3f} ({worst.name})."
    )
    return report


def save_report(report: ComparisonReport, directory: str | Path) -> Path:
    """
    Write the report as CSV tables and a JSON summary.

    :param report: The report.
    :param directory: Output directory, created if needed.
    :return: Path of the JSON summary.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for name, comparison in report.univariate.items():
        np.savetxt(
            directory / f"univariate_{name}.csv",
            np.column_stack(
                [comparison.edges[:-1], comparison.edges[1:], comparison.gt_hist, comparison.gen_hist]
            ),
            delimiter=",",
            header="bin_low,bin_high,gt,gen",
            comments="",
        )
    for comparison in report.bivariate:
        i, j = np.indices(comparison.gt_hist.shape)
        np.savetxt(
            directory / f"bivariate_{'__'.join(comparison.pair)}.csv",
            np.column_stack(
                [i.ravel(), j.ravel(), comparison.gt_hist.ravel(), comparison.gen_hist.ravel()]
            ),
            delimiter=",",
            header="i,j,gt,gen",
            comments="",
            fmt=("%d", "%d", "%.10g", "%.10g"),
        )
    if report.precision:
        np.savetxt(
            directory / "precision_separation.csv",
            np.array(
                [
                    (row.view, f"{row.precision_gt:.6g}", f"{row.precision_gen:.6g}",
                     f"{row.separation:.6g}")
                    for row in report.precision
                ],
                dtype=object,
            ),
            delimiter=",",
            header="view,P,P_hat,S",
            comments="",
            fmt="%s",
        )
    summary_file = directory / "summary.json"
    with open(summary_file, "w") as file:
        json.dump(report.summary(), file, indent=2)
    logging.info(f"Saved comparison report to {directory}.")
    return summary_file
