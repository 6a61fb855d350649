"""
CSV exports of scattering coefficients.
"""
from __future__ import annotations

import logging
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np

from library import constants
from library.scattering import statistics

if TYPE_CHECKING:
    from numpy.typing import NDArray

    from library.scattering.filters import FilterBank
    from library.scattering.transform import ScatteringCoeffs

COEFFICIENT_COLUMNS = ("order", "j1", "r1", "j2", "r2", "mean", "log_mean")
ROSE_COLUMNS = ("angle", "scale", "value")
COMPARISON_COLUMNS = (
    "order", "j1", "r1", "j2", "r2", "target_mean", "target_std",
    "synthesized", "inside_band"
)


def path_table(bank: FilterBank) -> NDArray:
    """
    Return one row (order, j1, r1, j2, r2) per path in SX order.

    Order-1 rows carry -1 for j2 and r2.
    """
    rows = [(1, j1, r1, -1, -1) for j1, r1 in bank.order1_paths()]
    rows += [(2, *path) for path in bank.order2_paths()]
    return np.array(rows, dtype=np.int64).reshape(-1, 5)


def coefficient_rows(
    coeffs: ScatteringCoeffs, bank: FilterBank, floor: float = constants.LOG_FLOOR
) -> NDArray:
    """Rows of (order, j1, r1, j2, r2, mean, log_mean) for every path."""
    means = coeffs.path_means()
    return np.column_stack(
        [path_table(bank), means, np.log(np.maximum(means, floor))]
    )


def write_coefficients_csv(
    coeffs: ScatteringCoeffs,
    bank: FilterBank,
    path: str | Path,
    floor: float = constants.LOG_FLOOR,
) -> None:
    """
    Dump the spatial means of all paths.

    :param coeffs: Coefficients of one image.
    :param bank: The filter bank that produced them.
    :param path: The CSV file.
    :param floor: Log floor.
    """
    np.savetxt(
        path,
        coefficient_rows(coeffs, bank, floor),
        delimiter=",",
        header=",".join(COEFFICIENT_COLUMNS),
        comments="",
        fmt=["%d"] * 5 + ["%.10g"] * 2,
    )
    logging.debug(f"Wrote scattering coefficients to {path}.")


def rose_rows(coeffs: ScatteringCoeffs, bank: FilterBank) -> NDArray:
    """
    First-order means arranged for a rose plot.

    :return: Array of rows (angle in degrees, scale j, value).
    """
    return np.array(
        [
            (r1 * 180.0 / bank.L, j1, float(np.mean(grid)))
            for (j1, r1), grid in coeffs.order1.items()
        ]
    ).reshape(-1, 3)


def write_rose_csv(
    coeffs: ScatteringCoeffs, bank: FilterBank, path: str | Path
) -> None:
    np.savetxt(
        path,
        rose_rows(coeffs, bank),
        delimiter=",",
        header=",".join(ROSE_COLUMNS),
        comments="",
        fmt=["%.6g", "%d", "%.10g"],
    )


def comparison_rows(
    target_ensemble: NDArray, synthesized: NDArray, bank: FilterBank
) -> NDArray:
    """
    Compare a synthesized SX vector to the target ensemble.

    :param target_ensemble: SX vectors of the target, shape (G, P).
    :param synthesized: SX vector of the synthesized image, shape (P, ).
    :param bank: The filter bank.
    :return: Rows of :data:`COMPARISON_COLUMNS`; ``inside_band`` is 1
        where the synthesized entry lies within three standard
        deviations of the target mean.
    """
    target_ensemble = np.atleast_2d(
        np.asarray(target_ensemble, dtype=np.float64)
    )
    if len(target_ensemble) > 1:
        target_mean, target_std = statistics.ensemble_moments(target_ensemble)
    else:
        target_mean = target_ensemble.mean(axis=0)
        target_std = np.zeros_like(target_mean)
    inside = np.abs(synthesized - target_mean) <= 3 * target_std
    return np.column_stack(
        [path_table(bank), target_mean, target_std, synthesized, inside]
    )


def write_comparison_csv(
    target_ensemble: NDArray,
    synthesized: NDArray,
    bank: FilterBank,
    path: str | Path,
) -> float:
    """
    Write the target-versus-synthesized comparison.

    :return: Fraction of paths inside the band.
    """
    rows = comparison_rows(target_ensemble, synthesized, bank)
    np.savetxt(
        path,
        rows,
        delimiter=",",
        header=",".join(COMPARISON_COLUMNS),
        comments="",
        fmt=["%d"] * 5 + ["%.10g"] * 3 + ["%d"],
    )
    fraction = float(rows[:, -1].mean()) if len(rows) else 0.0
    logging.info(f"{fraction:.1%} of the paths lie inside the target band.")
    return fraction
