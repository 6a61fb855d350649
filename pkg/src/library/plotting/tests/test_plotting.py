"""
Tests for the plotting library.
"""
from __future__ import annotations

import matplotlib.pyplot as plt
import numpy as np
import pytest

from library import constants
from library.plotting import common, plot_pores, plot_scattering, plot_surfaces
from library.spatial.model import PartGeometry
from library.surface.surface_map import SurfaceMap
from library.validation import reports
from library.voxels.volume import VoxelVolume


@pytest.fixture(autouse=True)
def close_figures():
    yield
    plt.close("all")


@pytest.fixture
def report():
    """Comparison of two random populations"""
    rng = np.random.default_rng(0)
    gt = {name: rng.normal(size=200) for name in constants.METRIC_NAMES}
    gen = {name: rng.normal(size=150) for name in constants.METRIC_NAMES}
    yield reports.univariate_report(gt, gen), reports.bivariate_report(gt, gen)


def test_sample_colors():
    colors = common.sample_colors("cmr.guppy", 4)
    assert len(colors) == 4
    assert all(len(c) == 3 for c in colors)


def test_overplot_histogram(mocker):
    mock_axes = mocker.Mock()
    edges = np.linspace(0, 1, 5)
    common.overplot_histogram(mock_axes, edges, np.ones(4), "red", "label")
    mock_axes.stairs.assert_called_once()
    args, kwargs = mock_axes.stairs.call_args
    np.testing.assert_array_equal(args[1], edges)
    assert kwargs["label"] == "label"


def test_label_for():
    assert common.label_for("anisotropy") == r"anisotropy $A$"
    assert common.label_for("phi_xy") == "phi xy"


def test_plot_loss_curves():
    fig, axes = common.plot_loss_curves(
        {"D": [1.0, 0.8, 0.9], "G": [2.0, 1.5, 1.0]}, running_minimum=True
    )
    assert len(axes.lines) == 4
    np.testing.assert_array_equal(axes.lines[1].get_ydata(), [1.0, 0.8, 0.8])


def test_univariate_histograms(report):
    univariate, _ = report
    fig, axes = plot_pores.plot_univariate_histograms(univariate)
    assert len(axes) == 6
    assert axes[0].get_title().startswith("KS = ")


def test_pair_contours(report):
    _, bivariate = report
    fig, axes = plot_pores.plot_pair_contours(bivariate[0])
    assert axes.get_xlabel() == common.label_for(bivariate[0].pair[0])
    assert axes.get_title().startswith("L1 = ")


def test_orthogonal_slices():
    data = np.zeros((8, 9, 10), dtype=np.uint8)
    data[0] = constants.EXTERIOR
    data[4, 4, 5] = constants.PORE
    fig, axes = plot_pores.plot_orthogonal_slices(
        {"gt": VoxelVolume(data), "gen": VoxelVolume(data)}
    )
    assert axes.shape == (2, 3)
    xy_image = axes[0, 0].get_images()[0].get_array()
    assert xy_image.shape == (9, 8)
    assert xy_image[4, 4] == 0.0
    assert xy_image[4, 0] == 1.0


def test_density_map():
    geometry = PartGeometry((100.0, 100.0), 50.0, 200.0)
    fig, axes = plot_pores.plot_density_map(np.ones((10, 10)), geometry, "N_b = 10")
    assert tuple(axes.get_images()[0].get_extent()) == (50.0, 150.0, 50.0, 150.0)
    assert axes.get_title() == "N_b = 10"


def test_phase_fractions():
    data = np.zeros((4, 4, 3), dtype=np.uint8)
    data[0, 0, 1] = constants.PORE
    fig, axes = plot_pores.plot_phase_fractions(VoxelVolume(data))
    np.testing.assert_allclose(axes.lines[0].get_ydata(), [0.0, 1 / 16, 0.0])


def test_surface_maps():
    values = np.linspace(-1, 2, 8 * 16).reshape(8, 16)
    surface = SurfaceMap(values, 40.0, 4.0, np.full((8, 2), 50.0))
    fig, axes = plot_surfaces.plot_surface_maps({"a": surface, "b": surface.with_values(values / 2)})
    assert len(axes) == 2
    assert axes[1].get_images()[0].get_clim() == (-2.0, 2.0)
    assert tuple(axes[0].get_images()[0].get_extent()) == (0, 360, 0, 32.0)


def test_rose_plot():
    rows = np.array([[0.0, 0, 1.0], [45.0, 0, 2.0], [0.0, 1, 0.5], [45.0, 1, 0.7]])
    fig, axes = plot_scattering.plot_rose({"target": rows, "synthesized": rows * [1, 1, 2]})
    assert len(axes.lines) == 4
    # two angles mirrored to the full circle, closed polygon
    assert len(axes.lines[0].get_xdata()) == 5


def test_coefficient_band():
    rows = np.array(
        [
            [1, 0, 0, -1, -1, 1.0, 0.1, 1.05, 1],
            [1, 1, 0, -1, -1, 2.0, 0.1, 3.00, 0],
        ]
    )
    fig, axes = plot_scattering.plot_coefficient_band(rows)
    assert axes.get_title() == "50% of paths inside the band"
