"""
Morlet filter bank of the 2D scattering transform.

All filters are stored by their discrete Fourier transforms at the
image resolution. Mother wavelets are indexed by ``j * L + r`` for the
scale ``j`` in [0, J) and the rotation ``r`` in [0, L).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from library.exceptions import ConfigError, ScaleTooLarge

if TYPE_CHECKING:
    from numpy.typing import NDArray

SIGMA0 = 0.8
"""Width of the envelope at scale j = 0 in pixels"""
XI0 = 3 * np.pi / 4
"""Center frequency at scale j = 0 in radians per pixel"""
SLANT = 0.5
"""Aspect ratio of the envelope"""


@dataclass(frozen=True, eq=False)
class FilterBank:
    """
    Frequency-domain filters for one image size.

    :param J: Number of scales; the averaging scale is 2^J.
    :param L: Number of rotations in [0, pi).
    :param image_side: Side length of the square images.
    :param psi: Mother wavelets, complex array of shape (J L, N, N).
    :param phi: Father wavelet, real array of shape (N, N) with
        ``phi[0, 0] == 1``.
    """
    J: int
    L: int
    image_side: int
    psi: NDArray
    phi: NDArray

    def psi_index(self, j: int, r: int) -> int:
        return j * self.L + r

    def order1_paths(self) -> list[tuple[int, int]]:
        """Paths (j1, r1) in output order."""
        return [(j1, r1) for j1 in range(self.J) for r1 in range(self.L)]

    def order2_paths(self) -> list[tuple[int, int, int, int]]:
        """Paths (j1, r1, j2, r2) with j2 > j1 in output order."""
        # yapf: disable
        return [
            (j1, r1, j2, r2)
            for j1 in range(self.J) for r1 in range(self.L)
            for j2 in range(j1 + 1, self.J) for r2 in range(self.L)
        ]
        # yapf: enable

    def littlewood_paley(self) -> NDArray:
        """
        Return ``|phi|^2 + 1/2 sum(|psi(w)|^2 + |psi(-w)|^2)`` on the grid.
        """
        energy = np.sum(np.abs(self.psi)**2, axis=0)
        mirrored = np.roll(energy[::-1, ::-1], 1, axis=(0, 1))
        return np.abs(self.phi)**2 + 0.5 * (energy + mirrored)


def _frequency_grid(side: int) -> tuple[NDArray, NDArray]:
    omega = 2 * np.pi * np.fft.fftfreq(side)
    return np.meshgrid(omega, omega, indexing="ij")


def gabor_hat(
    side: int, sigma: float, xi: float, theta: float, slant: float = SLANT
) -> NDArray:
    """
    Fourier transform of a Gabor filter, periodized over 3 x 3 images.

    :param side: Image side.
    :param sigma: Spatial width of the envelope along the wave vector.
    :param xi: Center frequency in radians per pixel.
    :param theta: Orientation of the wave vector in radians.
    :param slant: Envelope aspect ratio; smaller values elongate the
        filter perpendicular to the wave vector.
    :return: Real array of shape (side, side).
    """
    wx, wy = _frequency_grid(side)
    result = np.zeros((side, side))
    for a in (-1, 0, 1):
        for b in (-1, 0, 1):
            ox, oy = wx + 2 * np.pi * a, wy + 2 * np.pi * b
            u = ox * np.cos(theta) + oy * np.sin(theta)
            v = -ox * np.sin(theta) + oy * np.cos(theta)
            result += np.exp(-0.5 * sigma**2 * ((u - xi)**2 + v**2 / slant**2))
    return result


def morlet_hat(side: int, j: int, theta: float) -> NDArray:
    """
    Fourier transform of a zero-mean Morlet wavelet at scale 2^j.

    :param side: Image side.
    :param j: Scale index.
    :param theta: Orientation in radians.
    :return: Array of shape (side, side) with a zero DC coefficient.
    """
    sigma = SIGMA0 * 2**j
    xi = XI0 / 2**j
    wave = gabor_hat(side, sigma, xi, theta)
    envelope = gabor_hat(side, sigma, 0.0, theta)
    return wave - wave[0, 0] / envelope[0, 0] * envelope


def build_filter_bank(J: int, L: int, image_side: int) -> FilterBank:
    """
    Build Morlet wavelets at J scales and L rotations plus a Gaussian.

    The wavelets are rescaled pointwise in frequency such that the
    Littlewood-Paley sum equals one wherever a wavelet has support.

    :param J: Number of scales, at least 1.
    :param L: Number of rotations, at least 1.
    :param image_side: Side of the images to transform.
    :raises ScaleTooLarge: If 2^J exceeds the image side.
    :return: The filter bank.
    """
    if J < 1 or L < 1:
        raise ConfigError(f"J and L must be positive, got J={J}, L={L}.")
    if 2**J > image_side:
        raise ScaleTooLarge(
            f"Averaging scale 2^{J} = {2**J} exceeds the image side "
            f"{image_side}."
        )
    psi = np.stack(
        [
            morlet_hat(image_side, j, r * np.pi / L)
            for j in range(J) for r in range(L)
        ]
    ).astype(np.complex128)
    phi = gabor_hat(image_side, SIGMA0 * 2**J, 0.0, 0.0, slant=1.0)
    phi = phi / phi[0, 0]
    # Step 1: Littlewood-Paley sum of the raw wavelets
    energy = np.sum(np.abs(psi)**2, axis=0)
    mirrored = np.roll(energy[::-1, ::-1], 1, axis=(0, 1))
    lp = 0.5 * (energy + mirrored)
    # Step 2: fill the band left free by the low-pass
    target = np.clip(1.0 - phi**2, 0.0, None)
    scale = np.zeros_like(lp)
    support = lp > 1e-30
    scale[support] = np.sqrt(target[support] / lp[support])
    psi = psi * scale[None]
    logging.debug(
        f"Built filter bank with J={J}, L={L} at image side {image_side}."
    )
    return FilterBank(J, L, image_side, psi, phi)
