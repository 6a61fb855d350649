"""
First- and second-order 2D scattering coefficients.

The cascade is expressed with the operators of :mod:`library.autodiff`
so the very same transform can be differentiated with respect to the
input images.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from library.autodiff import ops
from library.autodiff.tensor import Tensor, default_dtype, no_grad
from library.exceptions import SizeMismatch

if TYPE_CHECKING:
    from numpy.typing import NDArray

    from library.scattering.filters import FilterBank


@dataclass(frozen=True, eq=False)
class ScatteringCoeffs:
    """
    Coefficient grids of one image, subsampled by 2^J.

    :param zeroth: Low-pass image ``x * phi_J``.
    :param order1: Grids by path (j1, r1).
    :param order2: Grids by path (j1, r1, j2, r2), j2 > j1.
    """
    zeroth: NDArray
    order1: dict[tuple[int, int], NDArray]
    order2: dict[tuple[int, int, int, int], NDArray]

    def path_means(self) -> NDArray:
        """Spatial means of all order-1 then order-2 paths."""
        grids = list(self.order1.values()) + list(self.order2.values())
        return np.array([float(np.mean(grid)) for grid in grids])


def _low_pass(x: Tensor, bank: FilterBank) -> Tensor:
    """Average with phi_J and subsample by 2^J; drops the filter axis."""
    averaged = ops.real(ops.conv2d_complex_freq(x, bank.phi[None]))
    averaged = ops.subsample(averaged, 2**bank.J)
    shape = averaged.shape
    return ops.reshape(averaged, shape[:-3] + shape[-2:])


def scattering_tensors(
    images: Tensor, bank: FilterBank
) -> tuple[Tensor, Tensor, Tensor | None]:
    """
    Differentiable scattering cascade on a batch of images.

    :param images: Tensor of shape (B, N, N).
    :param bank: Filter bank of image side N.
    :raises SizeMismatch: If the images do not match the bank.
    :return: Tuple of zeroth order (B, n, n), order 1 (B, J L, n, n)
        and order 2 (B, P2, n, n) tensors, ``n = ceil(N / 2^J)``.
        Order 2 is None for J = 1.
    """
    if images.ndim != 3 or images.shape[1:] != (bank.image_side, ) * 2:
        raise SizeMismatch(
            f"Images of shape {images.shape} do not match a filter bank "
            f"of side {bank.image_side}."
        )
    zeroth = _low_pass(images, bank)
    # Step 1: first-order modulus for all wavelets
    u1 = ops.modulus(ops.conv2d_complex_freq(images, bank.psi))
    order1 = _low_pass(u1, bank)
    # Step 2: second-order paths grouped by j1
    blocks = []
    for j1 in range(bank.J - 1):
        first = ops.take(u1, [bank.psi_index(j1, r) for r in range(bank.L)], axis=1)
        coarser = bank.psi[bank.psi_index(j1 + 1, 0):]
        u2 = ops.modulus(ops.conv2d_complex_freq(first, coarser))
        s2 = _low_pass(u2, bank)
        shape = s2.shape
        blocks.append(
            ops.reshape(s2, (shape[0], shape[1] * shape[2]) + shape[3:])
        )
    order2 = ops.concat(blocks, axis=1) if blocks else None
    return zeroth, order1, order2


def scatter2d(image: NDArray, bank: FilterBank) -> ScatteringCoeffs:
    """
    Scattering coefficients of a single image in double precision.

    :param image: Real array of shape (N, N); both axes are periodic.
    :param bank: Filter bank of image side N.
    :raises SizeMismatch: If the image does not match the bank.
    :return: The coefficient grids.
    """
    image = np.asarray(image, dtype=np.float64)
    if image.shape != (bank.image_side, bank.image_side):
        raise SizeMismatch(
            f"Image of shape {image.shape} does not match a filter bank "
            f"of side {bank.image_side}."
        )
    with default_dtype(np.float64), no_grad():
        zeroth, order1, order2 = scattering_tensors(Tensor(image[None]), bank)
    order1_grids = {
        path: order1.data[0, i] for i, path in enumerate(bank.order1_paths())
    }
    order2_grids = {}
    if order2 is not None:
        order2_grids = {
            path: order2.data[0, i] for i, path in enumerate(bank.order2_paths())
        }
    return ScatteringCoeffs(zeroth.data[0], order1_grids, order2_grids)
