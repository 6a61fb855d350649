"""
Tests for the validation pipeline.
"""
import json

import pytest

from library.exceptions import InvalidConfigPathError
from library.loading import load_stages
from library.surface import io as surface_io
from library.voxels import io as volume_io
from pipelines.deconstruction.deconstruct import DeconstructPipeline
from pipelines.ground_truth.synthetic_data import SyntheticDataPipeline
from pipelines.validation.compare import ValidationPipeline


@pytest.fixture
def self_comparison(make_stage, pipeline_config):
    """Stage directories where the generated parts are the ground truth."""
    home = pipeline_config.data_home
    make_stage(SyntheticDataPipeline, "ground_truth").run()
    make_stage(
        DeconstructPipeline, "deconstruction", input_dir=home / "ground_truth"
    ).run()
    generated = home / "part"
    generated.mkdir()
    for name, volume in load_stages.load_volumes(home / "ground_truth"):
        volume_io.save_volume(volume, generated / name)
    for name, surface in load_stages.load_surfaces(home / "deconstruction"):
        surface_io.save_surface(surface, generated / name)
    yield home


def test_self_comparison(make_stage, self_comparison, pipeline_config):
    pipeline = make_stage(
        ValidationPipeline, "validation", input_dir=self_comparison, no_plots=False
    )
    assert pipeline.run() == 0

    data_dir = pipeline_config.data_home / "validation"
    with open(data_dir / "summary.json", "r") as file:
        summary = json.load(file)
    n_pores = summary["n_pores"]["gt"]
    assert n_pores == summary["n_pores"]["gen"] > 0
    assert summary["reliable_fraction"]["gt"] == pytest.approx(
        summary["reliable_fraction"]["gen"]
    )
    # tables round to ten digits, so ties may split by at most a few pores
    for ks in summary["ks"].values():
        assert ks <= 3 / n_pores
    assert [row["view"] for row in summary["precision"]] == ["x", "y", "z", "surface"]

    assert (data_dir / "part_000_metrics.csv").exists()
    assert (data_dir / "univariate_volume_um3.csv").exists()
    figures = pipeline_config.figures_home / "validation"
    assert (figures / "validation_test_univariate.png").exists()
    assert (figures / "validation_test_slices.png").exists()
    assert any((figures / "pairs").glob("*.png"))


def test_missing_stage(make_stage, self_comparison):
    pipeline = make_stage(
        ValidationPipeline,
        "validation",
        input_dir=self_comparison,
        generated_subdir="nothing",
    )
    with pytest.raises(InvalidConfigPathError, match="nothing"):
        pipeline.run()
