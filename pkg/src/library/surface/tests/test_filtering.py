"""
Test smoothing and resampling of surface maps.
"""
import numpy as np
import pytest

from library.exceptions import WindowTooSmall
from library.surface import filtering
from library.surface.surface_map import SurfaceMap


def _map(values, radius=200.0, z_spacing=4.0):
    values = np.asarray(values, dtype=float)
    return SurfaceMap(
        values, radius, z_spacing, np.full((values.shape[0], 2), 300.0)
    )


@pytest.mark.parametrize(
    "window_um, spacing, size, expected",
    [(100.0, 4.0, 256, 25), (100.0, 5.0, 256, 21), (100.0, 4.0, 10, 9),
     (12.0, 4.0, 64, 3)],
)
def test_window_samples(window_um, spacing, size, expected):
    """Windows are rounded up to odd counts and capped by the size."""
    assert filtering.window_samples(window_um, spacing, size) == expected


def test_savgol_reproduces_polynomials():
    """Separable polynomials of degree 4 survive in the interior."""
    rows, columns = np.meshgrid(
        np.arange(64, dtype=float), np.arange(64, dtype=float), indexing="ij"
    )
    values = (
        1e-5 * (rows - 30)**4 - 0.01 * (rows - 30)**2 + 0.002 * rows**3 / 64
        + 1e-4 * (columns - 20)**3 + 0.1 * columns
    )
    smoothed = filtering.savgol(_map(values))
    # windows: 25 rows, 7 columns
    np.testing.assert_allclose(
        smoothed.values[12:52, 3:61], values[12:52, 3:61], atol=1e-9
    )


def test_savgol_constant_and_noise():
    """Constants are unchanged, white noise loses variance."""
    constant = _map(np.full((32, 64), 3.0))
    np.testing.assert_allclose(filtering.savgol(constant).values, 3.0)
    noise = np.random.default_rng(0).normal(size=(64, 64))
    smoothed = filtering.savgol(_map(noise))
    assert smoothed.values.var() < noise.var()


def test_savgol_window_too_small():
    """A window not exceeding the order raises."""
    with pytest.raises(WindowTooSmall):
        filtering.savgol(_map(np.zeros((32, 32))), window_um=10.0, order=4)


def test_demean(subtests):
    """Row and column means vanish."""
    rng = np.random.default_rng(1)
    theta_part = rng.normal(size=(1, 48))
    z_part = rng.normal(size=(32, 1))
    cases = {
        "constant": np.full((32, 48), 7.0),
        "separable": theta_part + z_part,
    }
    for name, values in cases.items():
        with subtests.test(msg=name):
            np.testing.assert_allclose(
                filtering.demean(_map(values)).values, 0.0, atol=1e-12
            )
    with subtests.test(msg="arbitrary"):
        result = filtering.demean(_map(rng.normal(size=(32, 48)))).values
        assert np.abs(result.mean(axis=0)).max() < 1e-9
        assert np.abs(result.mean(axis=1)).max() < 1e-9


def test_axis_means_reconstruct():
    """Demeaned map plus the removed means is the original map."""
    values = np.random.default_rng(2).normal(size=(16, 24))
    surface = _map(values)
    rows, columns, _ = filtering.axis_means(surface)
    restored = filtering.demean(surface).values + rows[:, None] + columns[None, :]
    np.testing.assert_allclose(restored, values, atol=1e-12)


def test_resize_identity_and_constant():
    """Matching shapes return the input, constants stay constant."""
    surface = _map(np.full((256, 256), 2.5))
    assert filtering.resize(surface) is surface
    resized = filtering.resize(_map(np.full((40, 100), 2.5)), (256, 256))
    assert resized.values.shape == (256, 256)
    np.testing.assert_allclose(resized.values, 2.5)


def test_resize_preserves_ramp():
    """An axial ramp is reproduced exactly by bilinear resampling."""
    rows = np.arange(64, dtype=float)[:, None] * np.ones((1, 32))
    resized = filtering.resize(_map(0.5 * rows), (100, 48))
    expected = 0.5 * np.linspace(0, 63, 100)[:, None] * np.ones((1, 48))
    np.testing.assert_allclose(resized.values, expected, atol=1e-6)
    assert resized.length_um == pytest.approx(64 * 4.0)


def test_resize_periodic_theta():
    """Theta is resampled periodically."""
    theta = 2 * np.pi * np.arange(64) / 64
    values = np.ones((8, 1)) * np.cos(theta)[None, :]
    resized = filtering.resize(_map(values), (8, 128))
    expected = np.cos(2 * np.pi * np.arange(128) / 128)
    np.testing.assert_allclose(resized.values[3], expected, atol=0.01)
