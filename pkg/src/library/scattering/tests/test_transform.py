"""
Test the filter bank and the scattering cascade.
"""
import numpy as np
import pytest

from library.exceptions import ScaleTooLarge, SizeMismatch
from library.scattering import filters, transform


@pytest.fixture(scope="module")
def bank():
    """Yield the standard bank at a small image side."""
    yield filters.build_filter_bank(4, 4, 32)


def test_filter_count_and_paths(bank):
    """J=4, L=4 gives 16 wavelets, 16 order-1 and 96 order-2 paths."""
    assert bank.psi.shape == (16, 32, 32)
    assert len(bank.order1_paths()) == 16
    assert len(bank.order2_paths()) == 96
    assert all(j2 > j1 for j1, _, j2, _ in bank.order2_paths())


def test_wavelets_have_zero_mean(bank):
    """DC coefficients vanish relative to the peaks."""
    peaks = np.abs(bank.psi).max(axis=(1, 2))
    assert np.all(np.abs(bank.psi[:, 0, 0]) <= 1e-6 * peaks)
    assert bank.phi[0, 0] == pytest.approx(1.0)


def test_littlewood_paley_bound(bank):
    """The frame sum lies in [0.5, 1.05] over the Nyquist disk."""
    omega = 2 * np.pi * np.fft.fftfreq(32)
    wx, wy = np.meshgrid(omega, omega, indexing="ij")
    disk = np.hypot(wx, wy) <= np.pi
    lp = bank.littlewood_paley()[disk]
    assert lp.min() >= 0.5
    assert lp.max() <= 1.05


def test_scale_too_large():
    """2^J beyond the image side raises."""
    with pytest.raises(ScaleTooLarge):
        filters.build_filter_bank(5, 4, 16)


def test_wrong_image_size(bank):
    """Images must match the bank."""
    with pytest.raises(SizeMismatch):
        transform.scatter2d(np.zeros((16, 16)), bank)


def test_constant_image(bank):
    """Wavelets annihilate constants; the low-pass keeps them."""
    coeffs = transform.scatter2d(np.full((32, 32), 3.0), bank)
    np.testing.assert_allclose(coeffs.zeroth, 3.0, atol=1e-10)
    assert coeffs.zeroth.shape == (2, 2)
    for grid in list(coeffs.order1.values()) + list(coeffs.order2.values()):
        np.testing.assert_allclose(grid, 0.0, atol=1e-10)


def test_shift_by_averaging_scale(bank):
    """Shifts by 2^J pixels leave the path means unchanged."""
    image = np.random.default_rng(0).normal(size=(32, 32))
    first = transform.scatter2d(image, bank).path_means()
    second = transform.scatter2d(np.roll(image, (16, 0), axis=(0, 1)), bank).path_means()
    np.testing.assert_allclose(second, first, rtol=1e-3)


def test_deterministic(bank):
    """Two runs produce bit-identical coefficients."""
    image = np.random.default_rng(1).normal(size=(32, 32))
    first = transform.scatter2d(image, bank).path_means()
    second = transform.scatter2d(image, bank).path_means()
    np.testing.assert_array_equal(first, second)


def test_single_pixel_matches_spatial_convolution():
    """Order-1 energy per scale agrees with spatial-domain convolution."""
    side, J, L = 32, 2, 2
    small_bank = filters.build_filter_bank(J, L, side)
    image = np.zeros((side, side))
    image[5, 9] = 1.0
    coeffs = transform.scatter2d(image, small_bank)
    phi_spatial = np.fft.ifft2(small_bank.phi).real
    for j in range(J):
        expected = 0.0
        result = 0.0
        for r in range(L):
            psi_spatial = np.fft.ifft2(small_bank.psi[small_bank.psi_index(j, r)])
            modulus = np.abs(np.roll(psi_spatial, (5, 9), axis=(0, 1)))
            averaged = np.zeros((side, side))
            for a, b in np.ndindex(side, side):
                averaged += modulus[a, b] * np.roll(phi_spatial, (a, b), axis=(0, 1))
            expected += np.sum(averaged[::2**J, ::2**J]**2)
            result += np.sum(coeffs.order1[(j, r)]**2)
        assert result == pytest.approx(expected, rel=1e-6)


def test_order2_matches_path_order(bank):
    """The flattened second order follows (j1, r1, j2, r2) order."""
    image = np.random.default_rng(2).normal(size=(32, 32))
    coeffs = transform.scatter2d(image, bank)
    assert list(coeffs.order2) == bank.order2_paths()
    assert len(coeffs.path_means()) == 112
