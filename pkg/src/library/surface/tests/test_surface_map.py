"""
Test unrolling and re-rolling of part surfaces.
"""
import numpy as np
import pytest

from library import constants
from library.exceptions import DoesNotFit, EmptySlice
from library.surface import surface_map
from library.surface.surface_map import SurfaceMap
from library.voxels.volume import VoxelVolume


def _part_from_radius(radius_fn, side, nz, voxel_size=4.0):
    """Rasterize a part whose boundary radius (voxels) depends on angle and z."""
    center = side / 2
    x = np.arange(side) + 0.5 - center
    dx, dy = np.meshgrid(x, x, indexing="ij")
    radius = np.hypot(dx, dy)
    angle = np.arctan2(dy, dx) % (2 * np.pi)
    data = np.full((side, side, nz), constants.EXTERIOR, dtype=np.uint8)
    for k in range(nz):
        data[:, :, k][radius <= radius_fn(angle, k)] = constants.SOLID
    return VoxelVolume(data, voxel_size)


def test_unroll_perfect_cylinder():
    """A digital cylinder unrolls to sub-voxel deviations."""
    volume = _part_from_radius(lambda a, k: 50.0, 110, 3)
    surface = surface_map.unroll(volume, 256)
    assert surface.values.shape == (3, 256)
    assert surface.nominal_radius == pytest.approx(200.0, abs=2.0)
    assert np.abs(surface.values).max() <= 0.5 * volume.voxel_size
    np.testing.assert_allclose(surface.axis_center, 220.0, atol=1e-9)


def test_unroll_ignores_pores():
    """Pore voxels count as part of the cross-section."""
    volume = _part_from_radius(lambda a, k: 30.0, 70, 2)
    data = volume.data.copy()
    data[30:40, 30:40, :] = constants.PORE
    with_pores = surface_map.unroll(VoxelVolume(data), 64)
    without = surface_map.unroll(volume, 64)
    np.testing.assert_allclose(with_pores.values, without.values, atol=1e-9)


def test_unroll_bump():
    """A hemispherical bump appears as one positive region at its angle."""
    side, nz, bump_z = 80, 24, 12

    def radius_fn(angle, k):
        # bump of radius 6 voxels centered on the surface at angle 0
        dz = k - bump_z
        arc = 30.0 * np.minimum(angle, 2 * np.pi - angle)
        height = np.sqrt(np.clip(36.0 - dz**2 - arc**2, 0.0, None))
        return 30.0 + height

    surface = surface_map.unroll(_part_from_radius(radius_fn, side, nz), 64)
    row, column = np.unravel_index(np.argmax(surface.values), surface.values.shape)
    assert abs(row - bump_z) <= 1
    assert column in (63, 0, 1)
    assert surface.values.max() > 15.0
    # far away from the bump the surface is flat
    assert np.abs(surface.values[:, 24:40]).max() < 6.0


def test_unroll_ellipse():
    """An elliptical section yields a cos(2 theta) pattern."""
    a, b = 52.0, 48.0

    def radius_fn(angle, k):
        return a * b / np.hypot(b * np.cos(angle), a * np.sin(angle))

    surface = surface_map.unroll(_part_from_radius(radius_fn, 120, 2), 128)
    profile = surface.values.mean(axis=0)
    spectrum = np.abs(np.fft.rfft(profile))
    assert np.argmax(spectrum[1:]) + 1 == 2
    amplitude = 2 * spectrum[2] / len(profile)
    assert amplitude == pytest.approx(8.0, abs=1.5)
    # maxima along the long axis
    assert profile[0] > 0 and profile[64] > 0 and profile[32] < 0


def test_unroll_empty_slice():
    """A slice without part voxels raises."""
    volume = _part_from_radius(lambda a, k: 10.0 if k == 0 else 0.0, 30, 2)
    with pytest.raises(EmptySlice):
        surface_map.unroll(volume, 16)


def _flat_map(value=0.0, n_z=8, n_theta=128, radius=160.0, center=200.0):
    return SurfaceMap(
        np.full((n_z, n_theta), value),
        radius,
        4.0,
        np.full((n_z, 2), center),
    )


def test_reroll_unroll_round_trip():
    """Zero deviations re-roll to a cylinder and unroll back."""
    volume = surface_map.reroll(_flat_map(), (100, 100, 8), 4.0)
    assert set(np.unique(volume.data)) == {constants.SOLID, constants.EXTERIOR}
    surface = surface_map.unroll(volume, 256)
    assert surface.nominal_radius == pytest.approx(160.0, abs=2.0)
    rms = np.sqrt(np.mean(surface.values**2))
    assert rms <= 0.6 * 4.0


def test_reroll_constant_offset():
    """A constant +10 um deviation widens the cylinder."""
    volume = surface_map.reroll(_flat_map(10.0), (100, 100, 4), 4.0)
    solid = np.count_nonzero(volume.data[:, :, 0] == constants.SOLID)
    assert solid == pytest.approx(np.pi * (170.0 / 4.0)**2, rel=0.02)
    assert surface_map.unroll(volume, 256).nominal_radius == pytest.approx(
        170.0, abs=2.0
    )


def test_reroll_bump_round_trip():
    """A bump on the map reappears at the same position."""
    rows, columns = np.meshgrid(np.arange(8), np.arange(128), indexing="ij")
    values = 12.0 * np.exp(-((rows - 4)**2 / 8.0 + (columns - 32)**2 / 18.0))
    bumped = SurfaceMap(values, 160.0, 4.0, np.full((8, 2), 200.0))
    volume = surface_map.reroll(bumped, (100, 100, 8), 4.0)
    surface = surface_map.unroll(volume, 128)
    row, column = np.unravel_index(np.argmax(surface.values), surface.values.shape)
    assert abs(row - 4) <= 1
    assert abs(column - 32) <= 2


def test_reroll_does_not_fit():
    """A boundary beyond the grid raises."""
    with pytest.raises(DoesNotFit):
        surface_map.reroll(_flat_map(50.0), (100, 100, 8), 4.0)


def test_sample_periodic_wraps():
    """Interpolation wraps around the last column."""
    values = np.zeros((2, 4))
    values[:, 3] = 1.0
    result = surface_map.sample_periodic(values, np.array([0.0]), np.array([3.5]))
    assert result[0] == pytest.approx(0.5)
    result = surface_map.sample_periodic(values, np.array([0.5]), np.array([-0.5]))
    assert result[0] == pytest.approx(0.5)
