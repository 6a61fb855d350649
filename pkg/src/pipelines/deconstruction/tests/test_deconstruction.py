"""
Tests for the deconstruction, spatial fit and bin ablation pipelines.
"""
import numpy as np
import pytest

from library.data_acquisition import synthetic_parts
from library.exceptions import DataError, InvalidConfigPathError
from library.gan import pore_archive
from library.processing import pore_metrics
from library.spatial import model as spatial_model
from library.surface import io as surface_io
from pipelines.deconstruction.deconstruct import DeconstructPipeline
from pipelines.deconstruction.spatial_fit import (
    MODEL_NAME,
    BinAblationPipeline,
    FitSpatialModelPipeline,
    load_populations,
)
from pipelines.ground_truth.synthetic_data import SyntheticDataPipeline


@pytest.fixture
def ground_truth(make_stage, pipeline_config):
    make_stage(SyntheticDataPipeline, "ground_truth").run()
    yield pipeline_config.data_home / "ground_truth"


@pytest.fixture
def deconstructed(make_stage, ground_truth, pipeline_config):
    make_stage(DeconstructPipeline, "deconstruction", input_dir=ground_truth).run()
    yield pipeline_config.data_home / "deconstruction"


def test_deconstruct_outputs(deconstructed, ground_truth):
    manifest = synthetic_parts.load_manifest(ground_truth)
    n_total = 0
    for index, entry in enumerate(manifest["parts"]):
        table = pore_metrics.read_metrics_csv(
            deconstructed / f"part_{index:03d}_metrics.csv"
        )
        assert len(table["volume_um3"]) == len(entry["pores"])
        n_total += len(entry["pores"])

        raw = surface_io.load_surface(
            deconstructed / "unrolled" / f"part_{index:03d}_surface.json"
        )
        smoothed = surface_io.load_surface(
            deconstructed / f"part_{index:03d}_surface.json"
        )
        assert smoothed.values.shape == (32, 64)
        assert np.std(smoothed.values) <= np.std(raw.values) + 1e-9

    cubes, sources, voxel_size = pore_archive.read_cubes(deconstructed / "cubes.h5")
    assert cubes.shape[1:] == (16, 16, 16)
    assert 0 < len(cubes) <= n_total
    assert set(np.unique(sources)) <= {0, 1}
    assert voxel_size == 4.0


def test_deconstruct_missing_input(make_stage, tmp_path):
    pipeline = make_stage(
        DeconstructPipeline, "deconstruction", input_dir=tmp_path / "missing"
    )
    with pytest.raises(InvalidConfigPathError, match="missing"):
        pipeline.run()


def test_load_populations(deconstructed, pipeline_config):
    populations = load_populations(deconstructed)
    assert len(populations) == 2
    for metrics, geometry in populations:
        assert geometry.radius == pytest.approx(60.0, abs=4.0)
        assert geometry.length == pytest.approx(128.0)
        assert all(m.volume_um3 > 0 for m in metrics)


def test_load_populations_needs_metrics(deconstructed):
    (deconstructed / "part_001_metrics.csv").unlink()
    with pytest.raises(DataError, match="part_001"):
        load_populations(deconstructed)


def test_fit_spatial_model(make_stage, deconstructed, pipeline_config):
    pipeline = make_stage(
        FitSpatialModelPipeline, "spatial", input_dir=deconstructed, no_plots=False
    )
    assert pipeline.run() == 0

    model = spatial_model.load_model(pipeline_config.data_home / "spatial" / MODEL_NAME)
    n_pores = sum(len(m) for m, _ in load_populations(deconstructed))
    assert model.n_bins == 4
    assert int(model.counts.sum()) == n_pores
    assert model.geometry.length == pytest.approx(2 * 128.0)
    figure = pipeline_config.figures_home / "spatial" / "spatial_test_density.png"
    assert figure.exists()


def test_bin_ablation(make_stage, deconstructed, pipeline_config):
    pipeline = make_stage(
        BinAblationPipeline, "spatial", input_dir=deconstructed, bin_counts=(2, 4, 8)
    )
    assert pipeline.run() == 0

    table = np.loadtxt(
        pipeline_config.data_home / "spatial" / "bin_ablation.csv",
        delimiter=",",
        skiprows=1,
    )
    np.testing.assert_array_equal(table[:, 0], [2, 4, 8])
    assert np.all((table[:, 1] >= 0) & (table[:, 1] <= 2))


def test_bin_ablation_needs_manifest(make_stage, deconstructed, tmp_path):
    pipeline = make_stage(
        BinAblationPipeline,
        "spatial",
        input_dir=deconstructed,
        ground_truth_dir=tmp_path / "elsewhere",
    )
    with pytest.raises(DataError, match="manifest"):
        pipeline.run()
