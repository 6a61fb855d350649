"""
Microcanonical synthesis of surface roughness maps.

A white-noise image is driven by gradient descent until the second
moments of its log scattering coefficients, taken over a fixed ensemble
of periodic translations, match those of the target map.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Literal

import numpy as np

from library import constants
from library.autodiff import ops, optim
from library.autodiff.tensor import Tensor, backward, no_grad
from library.exceptions import (
    ConfigError,
    Diverged,
    EnsembleTooSmall,
    TooManyMembers,
)
from library.scattering import filters, statistics, transform
from library.surface import filtering

if TYPE_CHECKING:
    from numpy.typing import NDArray

    from library.scattering.filters import FilterBank
    from library.surface.surface_map import SurfaceMap

Statistic = Literal["moments", "covariance"]


@dataclass(frozen=True)
class SynthConfig:
    """
    Parameters of one synthesis run.

    :param G: Number of periodic translations in the ensemble.
    :param iterations: Cap on the number of Adam iterations.
    :param J: Number of scattering scales.
    :param L: Number of scattering rotations.
    :param lr: Initial learning rate.
    :param lr_min: Learning rate reached at the end of the cosine decay.
    :param beta1: Adam first moment decay.
    :param beta2: Adam second moment decay.
    :param eps: Adam epsilon.
    :param tolerance: Loss below which the descent stops early.
    :param seed: Seed of the ensemble offsets and the initial noise.
    :param image_side: Working resolution of the descent.
    :param log_floor: Lower bound before taking logarithms.
    :param statistic: ``"moments"`` for the augmented second-moment
        matrix, ``"covariance"`` for the centred sample covariance.
    :param log_every: Log the loss every that many iterations.
    """
    G: int = 8
    iterations: int = 500
    J: int = constants.SCATTERING_J
    L: int = constants.SCATTERING_L
    lr: float = 0.05
    lr_min: float = 0.005
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    tolerance: float = 1e-8
    seed: int = 0
    image_side: int = constants.SURFACE_IMAGE_SIDE
    log_floor: float = constants.LOG_FLOOR
    statistic: Statistic = "moments"
    log_every: int = 50

    def __post_init__(self):
        if self.G < 2:
            raise EnsembleTooSmall(
                f"The translation ensemble needs G >= 2, got {self.G}."
            )
        if self.iterations < 1:
            raise ConfigError(
                f"At least one iteration is required, got {self.iterations}."
            )
        if self.statistic not in ("moments", "covariance"):
            raise ConfigError(f"Unknown ensemble statistic {self.statistic!r}.")

    def learning_rate(self, iteration: int) -> float:
        """Cosine decay from ``lr`` to ``lr_min`` over all iterations."""
        progress = iteration / max(self.iterations - 1, 1)
        cosine = 0.5 * (1 + math.cos(math.pi * progress))
        return self.lr_min + (self.lr - self.lr_min) * cosine


@dataclass
class SynthRun:
    """
    Record of one synthesis run.

    :param loss_trace: Loss at every evaluated iterate.
    :param image: Best iterate at working resolution, demeaned.
    :param target_stats: The target ensemble statistic.
    :param offsets: Ensemble translations, shape (G, 2).
    :param best_iteration: Index of the returned iterate.
    """
    loss_trace: list[float] = field(default_factory=list)
    image: NDArray | None = None
    target_stats: NDArray | None = None
    offsets: NDArray | None = None
    best_iteration: int = 0

    @property
    def best_loss(self) -> float:
        return min(self.loss_trace) if self.loss_trace else math.inf

    def running_minimum(self) -> NDArray:
        """Best-so-far loss after every iteration."""
        return np.minimum.accumulate(np.asarray(self.loss_trace))

    def to_json(self) -> dict:
        return {
            "loss_trace": [float(v) for v in self.loss_trace],
            "best_iteration": self.best_iteration,
            "best_loss": self.best_loss,
            "offsets": np.asarray(self.offsets).tolist(),
        }


def ensemble_offsets(
    shape: tuple[int, int], G: int, seed: int | np.random.Generator
) -> NDArray:
    """
    Draw G distinct periodic translations of an image.

    :param shape: Image shape (H, W).
    :param G: Ensemble size.
    :param seed: Seed or generator.
    :raises EnsembleTooSmall: If G < 2.
    :raises TooManyMembers: If G exceeds H W.
    :return: Integer array of shape (G, 2); row 0 is the identity.
    """
    if G < 2:
        raise EnsembleTooSmall(f"Ensembles need G >= 2, got {G}.")
    total = shape[0] * shape[1]
    if G > total:
        raise TooManyMembers(
            f"An image of shape {shape} has only {total} distinct "
            f"translations, {G} were requested."
        )
    rng = np.random.default_rng(seed)
    flat = rng.choice(total - 1, size=G - 1, replace=False) + 1
    flat = np.concatenate([[0], np.sort(flat)])
    return np.column_stack(np.divmod(flat, shape[1])).astype(np.int64)


def make_ensemble(
    image: NDArray, G: int, seed: int | np.random.Generator
) -> list[NDArray]:
    """Return G distinct circular shifts of ``image``, identity first."""
    offsets = ensemble_offsets(image.shape, G, seed)
    return [np.roll(image, tuple(o), axis=(0, 1)) for o in offsets]


def ensemble_statistic(
    x: Tensor,
    offsets: NDArray,
    bank: FilterBank,
    statistic: Statistic = "moments",
    floor: float = constants.LOG_FLOOR,
) -> Tensor:
    """
    Second moments of the log scattering vectors across translations.

    :param x: Image tensor of shape (N, N).
    :param offsets: Translations, shape (G, 2).
    :param bank: Filter bank of side N.
    :param statistic: ``"moments"`` gives ``E[s s^T]`` with
        ``s = [1, SX]``; ``"covariance"`` gives the unbiased covariance
        of SX.
    :param floor: Log floor.
    :return: Symmetric matrix tensor.
    """
    members = ops.circular_shifts(x, offsets)
    _, order1, order2 = transform.scattering_tensors(members, bank)
    coeffs = statistics.log_coeff_tensor(order1, order2, floor)
    G = coeffs.shape[0]
    if statistic == "covariance":
        centring = np.eye(G) - np.full((G, G), 1.0 / G)
        centred = ops.matmul(Tensor(centring), coeffs)
        return ops.scalar_mul(
            ops.matmul(ops.transpose(centred), centred), 1.0 / (G - 1)
        )
    augmented = ops.concat([Tensor(np.ones((G, 1))), coeffs], axis=1)
    return ops.scalar_mul(
        ops.matmul(ops.transpose(augmented), augmented), 1.0 / G
    )


def target_statistics(
    image: NDArray,
    offsets: NDArray,
    bank: FilterBank,
    statistic: Statistic = "moments",
    floor: float = constants.LOG_FLOOR,
) -> NDArray:
    """Evaluate :func:`ensemble_statistic` on a fixed image."""
    with no_grad():
        return ensemble_statistic(
            Tensor(image), offsets, bank, statistic, floor
        ).numpy()


def mst_cov_loss(
    x: Tensor,
    target: NDArray,
    offsets: NDArray,
    bank: FilterBank,
    statistic: Statistic = "moments",
    floor: float = constants.LOG_FLOOR,
) -> Tensor:
    """
    Squared Frobenius distance between ensemble statistics.

    :param x: Image tensor of shape (N, N).
    :param target: Statistic of the target under the same offsets.
    :param offsets: Translations, shape (G, 2).
    :param bank: Filter bank of side N.
    :param statistic: See :func:`ensemble_statistic`.
    :param floor: Log floor.
    :return: Scalar tensor.
    """
    current = ensemble_statistic(x, offsets, bank, statistic, floor)
    return ops.sum(ops.square(ops.sub(current, Tensor(target))))


def _working_image(surface: SurfaceMap, side: int) -> tuple[SurfaceMap, NDArray]:
    resized = filtering.resize(surface, (side, side))
    return resized, filtering.demean(resized).values


def synthesize(
    target: SurfaceMap,
    config: SynthConfig | None = None,
    init: SurfaceMap | None = None,
    bank: FilterBank | None = None,
) -> tuple[SurfaceMap, SynthRun]:
    """
    Synthesize a roughness map with the statistics of ``target``.

    :param target: The measured surface map.
    :param config: Run parameters; defaults if None.
    :param init: Optional starting map instead of white noise.
    :param bank: Optional prebuilt filter bank of the working side.
    :raises Diverged: If the loss becomes non-finite.
    :return: The best iterate at the target's resolution with the
        target's row and column means added back, and the run record.
    """
    config = config or SynthConfig()
    side = config.image_side
    if bank is None:
        bank = filters.build_filter_bank(config.J, config.L, side)
    rng = np.random.default_rng(config.seed)
    # Step 1: preprocess the target and record the removed means
    resized, target_image = _working_image(target, side)
    row_means, column_means, _ = filtering.axis_means(resized)
    offsets = ensemble_offsets((side, side), config.G, rng)
    target_stats = target_statistics(
        target_image, offsets, bank, config.statistic, config.log_floor
    )
    # Step 2: initial image
    if init is not None:
        start = _working_image(init, side)[1]
    else:
        start = rng.normal(scale=target_image.std(), size=(side, side))
    x = Tensor(start, requires_grad=True)
    adam = optim.AdamState.for_params(
        [x], config.lr, beta1=config.beta1, beta2=config.beta2, eps=config.eps
    )
    run = SynthRun(target_stats=target_stats, offsets=offsets)
    best = x.numpy()
    # Step 3: Adam descent keeping the best iterate
    for iteration in range(config.iterations):
        loss = mst_cov_loss(
            x, target_stats, offsets, bank, config.statistic, config.log_floor
        )
        value = loss.item()
        if not np.isfinite(value):
            raise Diverged(
                f"Synthesis loss became non-finite at iteration {iteration}."
            )
        run.loss_trace.append(value)
        if value <= run.best_loss:
            best = x.numpy()
            run.best_iteration = iteration
        if iteration % config.log_every == 0:
            logging.info(f"Synthesis iteration {iteration}: loss {value:.4e}.")
        if value <= config.tolerance:
            logging.info(
                f"Synthesis converged after {iteration + 1} iterations."
            )
            break
        optim.zero_grad([x])
        backward(loss)
        adam.lr = config.learning_rate(iteration)
        optim.adam_step([x], adam)
    logging.info(
        f"Best synthesis loss {run.best_loss:.4e} at iteration "
        f"{run.best_iteration}."
    )
    # Step 4: re-mean and return to the original resolution
    image = filtering.demean(resized.with_values(best.astype(np.float64))).values
    run.image = image
    remeaned = resized.with_values(
        image + row_means[:, None] + column_means[None, :]
    )
    output = filtering.resize(remeaned, target.values.shape)
    return target.with_values(output.values), run


def postprocess(
    surface: SurfaceMap,
    window_um: float = constants.SAVGOL_WINDOW_UM,
    order: int = constants.SAVGOL_ORDER,
) -> SurfaceMap:
    """Remove sharp discontinuities with the smoothing of measured maps."""
    return filtering.savgol(surface, window_um, order)
