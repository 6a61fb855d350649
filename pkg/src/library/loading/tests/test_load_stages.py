"""
Tests for the stage artifact loaders.
"""
import json

import numpy as np
import pytest

from library import constants
from library.exceptions import DataError, EmptyDataset
from library.loading import load_stages
from library.processing import pore_metrics
from library.surface import io as surface_io
from library.surface.surface_map import SurfaceMap
from library.voxels import io as volume_io
from library.voxels.labeling import extract_pores, label_components
from library.voxels.volume import VoxelVolume


@pytest.fixture
def stage_dir(tmp_path):
    """A directory with two volumes, one surface and a manifest"""
    for index in (1, 0):
        data = np.zeros((6, 6, 6), dtype=np.uint8)
        data[1:3, 1:3, 1:3 + index] = constants.PORE
        volume_io.save_volume(VoxelVolume(data), tmp_path / f"part_{index:03d}")
    surface = SurfaceMap(np.zeros((4, 8)), 10.0, 4.0, np.full((4, 2), 12.0))
    surface_io.save_surface(surface, tmp_path / "part_000_surface")
    with open(tmp_path / "manifest.json", "w") as file:
        json.dump({"parts": []}, file)
    (tmp_path / "broken.json").write_text("{not json")
    yield tmp_path


def test_artifact_kind(stage_dir):
    assert load_stages.artifact_kind(stage_dir / "part_000.json") == "volume"
    assert load_stages.artifact_kind(stage_dir / "part_000_surface.json") == "surface"
    assert load_stages.artifact_kind(stage_dir / "manifest.json") is None
    assert load_stages.artifact_kind(stage_dir / "broken.json") is None


def test_load_volumes(stage_dir):
    volumes = load_stages.load_volumes(stage_dir)
    assert [name for name, _ in volumes] == ["part_000", "part_001"]
    assert volumes[0][1].pore_voxel_count() == 8
    assert volumes[1][1].pore_voxel_count() == 12


def test_load_surfaces(stage_dir):
    surfaces = load_stages.load_surfaces(stage_dir)
    assert len(surfaces) == 1
    assert surfaces[0][0] == "part_000_surface"
    assert surfaces[0][1].values.shape == (4, 8)


def test_missing_artifacts(tmp_path):
    with pytest.raises(EmptyDataset):
        load_stages.load_volumes(tmp_path)
    with pytest.raises(EmptyDataset):
        load_stages.load_surfaces(tmp_path)
    with pytest.raises(EmptyDataset):
        load_stages.load_metric_table(tmp_path)
    with pytest.raises(DataError):
        load_stages.find_headers(tmp_path / "absent", "volume")


def test_load_metric_table(stage_dir):
    for name, volume in load_stages.load_volumes(stage_dir):
        pores = extract_pores(label_components(volume))
        metrics = pore_metrics.population_metrics(pores)
        pore_metrics.write_metrics_csv(metrics, stage_dir / f"{name}_metrics.csv")
    table = load_stages.load_metric_table(stage_dir)
    np.testing.assert_allclose(table["volume_um3"], [8 * 64.0, 12 * 64.0])
