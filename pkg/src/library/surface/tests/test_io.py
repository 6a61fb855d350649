"""
Test the surface map file format.
"""
import json

import numpy as np
import pytest

from library.exceptions import DataError
from library.surface import io
from library.surface.surface_map import SurfaceMap


@pytest.fixture
def surface():
    """Yield a random non-square surface map."""
    rng = np.random.default_rng(3)
    yield SurfaceMap(
        rng.normal(scale=5.0, size=(12, 20)),
        150.0,
        4.0,
        rng.uniform(190, 210, size=(12, 2)),
    )


def test_save_and_load(tmp_path, surface):
    """A round trip is exact to single precision."""
    header_file = io.save_surface(surface, tmp_path / "surface")
    loaded = io.load_surface(header_file)
    np.testing.assert_array_equal(
        loaded.values, surface.values.astype(np.float32)
    )
    assert loaded.nominal_radius == 150.0
    assert loaded.z_spacing == 4.0
    np.testing.assert_allclose(loaded.axis_center, surface.axis_center)


def test_raw_layout_theta_fastest(tmp_path, surface):
    """The first n_theta values of the raw file are the first row."""
    io.save_surface(surface, tmp_path / "surface")
    raw = np.fromfile(tmp_path / "surface.raw", dtype="<f4")
    np.testing.assert_array_equal(raw[:20], surface.values[0].astype(np.float32))
    header = json.loads((tmp_path / "surface.json").read_text())
    assert header["n_theta"] == 20 and header["n_z"] == 12


def test_truncated_raw_file(tmp_path, surface):
    """A raw file not matching the header raises."""
    io.save_surface(surface, tmp_path / "surface")
    raw_file = tmp_path / "surface.raw"
    raw_file.write_bytes(raw_file.read_bytes()[:-4])
    with pytest.raises(DataError):
        io.load_surface(tmp_path / "surface")


def test_save_preview(tmp_path, surface):
    """The preview is written as PNG."""
    io.save_preview(surface, tmp_path / "preview.png")
    assert (tmp_path / "preview.png").read_bytes()[:4] == b"\x89PNG"
