"""
Log-coefficient vectors, ensemble covariance and the precision and
separation metrics between populations of images.
"""
from __future__ import annotations

from typing import TYPE_CHECKING, Sequence

import numpy as np

from library import constants
from library.autodiff import ops
from library.exceptions import EnsembleTooSmall

if TYPE_CHECKING:
    from numpy.typing import NDArray

    from library.autodiff.tensor import Tensor
    from library.scattering.transform import ScatteringCoeffs


def log_coeffs(
    coeffs: ScatteringCoeffs, floor: float = constants.LOG_FLOOR
) -> NDArray:
    """
    Return the vector SX of log spatial means.

    :param coeffs: Coefficients of one image.
    :param floor: Lower bound applied before the logarithm.
    :return: Array of order-1 then order-2 entries in path order.
    """
    return np.log(np.maximum(coeffs.path_means(), floor))


def log_coeff_tensor(
    order1: Tensor, order2: Tensor | None, floor: float = constants.LOG_FLOOR
) -> Tensor:
    """
    Differentiable counterpart of :func:`log_coeffs` for a batch.

    :param order1: Tensor of shape (B, P1, n, n).
    :param order2: Tensor of shape (B, P2, n, n) or None.
    :param floor: Lower bound applied before the logarithm.
    :return: Tensor of shape (B, P1 + P2).
    """
    means = ops.mean_pool(order1)
    if order2 is not None:
        means = ops.concat([means, ops.mean_pool(order2)], axis=1)
    return ops.log_floor(means, floor)


def _as_matrix(samples: Sequence[NDArray] | NDArray) -> NDArray:
    matrix = np.asarray(samples, dtype=np.float64)
    if matrix.ndim != 2 or len(matrix) < 2:
        raise EnsembleTooSmall(
            f"Ensemble statistics need at least two vectors, got "
            f"{len(matrix)}."
        )
    return matrix


def covariance(ensemble: Sequence[NDArray] | NDArray) -> NDArray:
    """
    Unbiased sample covariance across an ensemble of SX vectors.

    :param ensemble: Array of shape (G, P), G >= 2.
    :raises EnsembleTooSmall: If fewer than two vectors are given.
    :return: Symmetric array of shape (P, P).
    """
    matrix = _as_matrix(ensemble)
    return np.atleast_2d(np.cov(matrix, rowvar=False, ddof=1))


def ensemble_moments(ensemble: Sequence[NDArray] | NDArray) -> tuple[NDArray, NDArray]:
    """Per-path mean and unbiased standard deviation."""
    matrix = _as_matrix(ensemble)
    return matrix.mean(axis=0), matrix.std(axis=0, ddof=1)


def precision(samples: Sequence[NDArray] | NDArray) -> float:
    """
    Relative spread of SX vectors around their mean.

    ``P = (E|SX|^2 - |E SX|^2) / E|SX|^2`` with sample means.

    :param samples: Array of shape (M, P), M >= 2.
    :raises EnsembleTooSmall: If fewer than two vectors are given.
    :return: P in [0, 1].
    """
    matrix = _as_matrix(samples)
    second = float(np.mean(np.sum(matrix**2, axis=1)))
    if second == 0:
        return 0.0
    first = float(np.sum(matrix.mean(axis=0)**2))
    return max(second - first, 0.0) / second


def separation(
    x_samples: Sequence[NDArray] | NDArray,
    xhat_samples: Sequence[NDArray] | NDArray,
) -> float:
    """
    Distance between two populations of SX vectors.

    ``S = (E|SX|^2 + E|SXh|^2 - 2 E SX . E SXh)
    / (0.5 (E|SX|^2 + E|SXh|^2))``.

    :param x_samples: Array of shape (M, P).
    :param xhat_samples: Array of shape (M', P).
    :return: The separation S >= 0.
    """
    first = np.atleast_2d(np.asarray(x_samples, dtype=np.float64))
    second = np.atleast_2d(np.asarray(xhat_samples, dtype=np.float64))
    energy_x = float(np.mean(np.sum(first**2, axis=1)))
    energy_xhat = float(np.mean(np.sum(second**2, axis=1)))
    total = energy_x + energy_xhat
    if total == 0:
        return 0.0
    cross = float(first.mean(axis=0) @ second.mean(axis=0))
    return max(total - 2 * cross, 0.0) / (0.5 * total)
