"""
Tests for the synthetic ground truth pipeline.
"""
import json

import numpy as np
import pytest

from library.data_acquisition import synthetic_parts
from library.exceptions import MissingSeedError
from library.voxels import io as volume_io
from pipelines.base import RUN_INFO_NAME
from pipelines.ground_truth.synthetic_data import SyntheticDataPipeline


def test_writes_parts_and_manifest(make_stage, pipeline_config):
    pipeline = make_stage(SyntheticDataPipeline, "ground_truth", no_plots=False)
    assert pipeline.run() == 0

    data_dir = pipeline_config.data_home / "ground_truth"
    manifest = synthetic_parts.load_manifest(data_dir)
    assert len(manifest["parts"]) == 2
    assert manifest["config"]["n_pores"] == 40
    for index in range(2):
        assert (data_dir / f"part_{index:03d}.json").exists()
        assert (data_dir / f"part_{index:03d}_surface.json").exists()

    with open(data_dir / RUN_INFO_NAME, "r") as file:
        info = json.load(file)
    assert info["pipeline"] == "SyntheticDataPipeline"
    assert info["config_hash"] == pipeline_config.config_hash
    assert info["seed"] == 5

    figures = pipeline_config.figures_home / "ground_truth"
    for flag in ("slices", "surface", "density"):
        assert (figures / f"ground_truth_test_{flag}.png").exists()


def test_is_deterministic(make_stage, pipeline_config):
    data_dir = pipeline_config.data_home / "ground_truth"
    make_stage(SyntheticDataPipeline, "ground_truth").run()
    first = volume_io.load_volume(data_dir / "part_001.json").data.copy()
    make_stage(SyntheticDataPipeline, "ground_truth").run()
    second = volume_io.load_volume(data_dir / "part_001.json").data
    np.testing.assert_array_equal(first, second)


def test_requires_seed(make_stage, pipeline_config):
    pipeline_config.seed = None
    pipeline = make_stage(SyntheticDataPipeline, "ground_truth")
    with pytest.raises(MissingSeedError):
        pipeline.run()
    assert not (pipeline_config.data_home / "ground_truth").exists()
