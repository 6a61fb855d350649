"""
Adversarial training of the pore GAN and sampling of trained generators.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Sequence

import numpy as np

from library import constants
from library.autodiff import checkpoint, ops, optim
from library.autodiff.tensor import Tensor, backward, no_grad
from library.exceptions import ConfigError, Diverged, EmptyDataset, ShapeMismatch
from library.gan.networks import LATENT_SIZE, Discriminator, Generator, profile_geometry

if TYPE_CHECKING:
    from numpy.typing import NDArray

    from library.voxels.volume import VoxelVolume


@dataclass(frozen=True)
class TrainConfig:
    """
    Hyperparameters of GAN training.

    :param batch_size: Cubes per update.
    :param epochs: Passes over the dataset.
    :param lr: Adam learning rate of both networks.
    :param latent: Length of the latent vectors.
    :param seed: Seed of initialization, shuffling and latents.
    :param profile: Network profile, ``"desk"`` or ``"full"``.
    :param beta1: Adam first moment decay of both networks.
    :param beta2: Adam second moment decay of both networks.
    """
    batch_size: int = 32
    epochs: int = 40
    lr: float = 2e-5
    latent: int = LATENT_SIZE
    seed: int = 0
    profile: str = "desk"
    beta1: float = 0.5
    beta2: float = 0.999

    def __post_init__(self):
        for name in ("batch_size", "epochs", "lr", "latent"):
            if not getattr(self, name) > 0:
                raise ConfigError(
                    f"Training parameter {name} must be positive, got "
                    f"{getattr(self, name)}."
                )
        profile_geometry(self.profile)


@dataclass
class TrainResult:
    """
    Trained networks and per-epoch mean losses.

    :param generator: The trained generator.
    :param discriminator: The trained discriminator.
    :param d_losses: Mean discriminator loss of every epoch.
    :param g_losses: Mean generator loss of every epoch.
    :param config: The configuration used.
    """
    generator: Generator
    discriminator: Discriminator
    config: TrainConfig
    d_losses: list[float] = field(default_factory=list)
    g_losses: list[float] = field(default_factory=list)


def as_two_channel(cubes: Sequence[VoxelVolume] | NDArray) -> NDArray:
    """
    One-hot encode phase cubes; channel 0 marks pore voxels.

    :param cubes: Volumes or an array of shape (M, S, S, S) of phase
        codes.
    :return: Array of shape (M, 2, S, S, S).
    """
    if isinstance(cubes, np.ndarray):
        phases = cubes
    else:
        phases = np.stack([c.data for c in cubes]) if len(cubes) else np.zeros((0, 1, 1, 1))
    pores = (phases == constants.PORE).astype(np.float64)
    return np.stack([pores, 1.0 - pores], axis=1)


def _bce_real(logits: Tensor) -> Tensor:
    """``-mean(log D)`` for cubes labeled real."""
    return ops.neg(ops.mean(ops.log_sigmoid(logits)))


def _bce_fake(logits: Tensor) -> Tensor:
    """``-mean(log(1 - D))`` for cubes labeled generated."""
    return ops.neg(ops.mean(ops.log_sigmoid(ops.neg(logits))))


def _check_finite(value: float, epoch: int, network: str) -> float:
    if not np.isfinite(value):
        raise Diverged(f"{network} loss became non-finite in epoch {epoch}.")
    return value


def train(
    dataset: Sequence[VoxelVolume] | NDArray, config: TrainConfig | None = None
) -> TrainResult:
    """
    Train generator and discriminator on centred pore cubes.

    Every batch performs one discriminator update on real cubes and
    detached generated cubes, followed by one generator update with the
    non-saturating loss ``-log D(G(z))``.

    :param dataset: Centred pore cubes of the profile side.
    :param config: Hyperparameters; defaults if None.
    :raises EmptyDataset: If no cubes are given.
    :raises ShapeMismatch: If the cubes do not match the profile side.
    :raises Diverged: If a loss becomes non-finite.
    :return: The trained networks and loss traces.
    """
    config = config or TrainConfig()
    if len(dataset) == 0:
        raise EmptyDataset("GAN training needs at least one pore cube.")
    side, _ = profile_geometry(config.profile)
    real = as_two_channel(dataset)
    if real.shape[2:] != (side, ) * 3:
        raise ShapeMismatch("train", real.shape[2:], (side, ) * 3)
    rng = np.random.default_rng(config.seed)
    generator = Generator.initialize(config.profile, config.latent, rng)
    discriminator = Discriminator.initialize(config.profile, rng)
    g_params, d_params = generator.parameters(), discriminator.parameters()
    adam_kwargs = {"beta1": config.beta1, "beta2": config.beta2}
    g_state = optim.AdamState.for_params(g_params, config.lr, **adam_kwargs)
    d_state = optim.AdamState.for_params(d_params, config.lr, **adam_kwargs)
    result = TrainResult(generator, discriminator, config)
    generator.set_training(True)
    logging.info(
        f"Training {config.profile} GAN on {len(real)} cubes for "
        f"{config.epochs} epochs."
    )
    for epoch in range(config.epochs):
        order = rng.permutation(len(real))
        d_sum, g_sum, n_batches = 0.0, 0.0, 0
        for start in range(0, len(real), config.batch_size):
            batch = Tensor(real[order[start:start + config.batch_size]])
            size = batch.shape[0]
            # Step 1: discriminator update on real and detached fakes
            with no_grad():
                fake = generator(Tensor(rng.normal(size=(size, config.latent))))
            optim.zero_grad(d_params)
            d_loss = ops.add(
                _bce_real(discriminator.logits(batch)),
                _bce_fake(discriminator.logits(fake.detach())),
            )
            backward(d_loss)
            optim.adam_step(d_params, d_state)
            # Step 2: generator update through the discriminator
            optim.zero_grad(g_params)
            optim.zero_grad(d_params)
            fake = generator(Tensor(rng.normal(size=(size, config.latent))))
            g_loss = _bce_real(discriminator.logits(fake))
            backward(g_loss)
            optim.adam_step(g_params, g_state)
            d_sum += _check_finite(d_loss.item(), epoch, "Discriminator")
            g_sum += _check_finite(g_loss.item(), epoch, "Generator")
            n_batches += 1
        result.d_losses.append(d_sum / n_batches)
        result.g_losses.append(g_sum / n_batches)
        logging.info(
            f"Epoch {epoch + 1}/{config.epochs}: D loss "
            f"{result.d_losses[-1]:.4f}, G loss {result.g_losses[-1]:.4f}."
        )
    return result


def generate(generator: Generator, z: NDArray) -> NDArray:
    """
    Sample probability cubes with frozen normalization statistics.

    :param generator: A generator.
    :param z: Latent vectors, shape (N, latent).
    :return: Array of shape (N, 2, S, S, S) summing to one over axis 1.
    """
    generator.set_training(False)
    try:
        with no_grad():
            return generator(Tensor(np.atleast_2d(z))).numpy()
    finally:
        generator.set_training(True)


def save_networks(result: TrainResult, stem: str | Path) -> tuple[Path, Path]:
    """
    Write generator and discriminator checkpoints.

    :param result: The training outcome.
    :param stem: Common stem; ``_generator`` and ``_discriminator`` are
        appended.
    :return: Paths to the two manifests.
    """
    stem = Path(stem)
    metadata = {
        "profile": result.config.profile,
        "latent": result.config.latent,
        "seed": result.config.seed,
        "epochs": result.config.epochs,
        "d_losses": result.d_losses,
        "g_losses": result.g_losses,
    }
    generator_file = checkpoint.save_checkpoint(
        stem.parent / f"{stem.name}_generator",
        result.generator.state_arrays(),
        metadata | {"network": "generator"},
    )
    discriminator_file = checkpoint.save_checkpoint(
        stem.parent / f"{stem.name}_discriminator",
        result.discriminator.state_arrays(),
        metadata | {"network": "discriminator"},
    )
    return generator_file, discriminator_file


def load_generator(manifest_file: str | Path) -> Generator:
    """Rebuild a generator from its checkpoint."""
    arrays, metadata = checkpoint.load_checkpoint(manifest_file)
    generator = Generator.initialize(metadata["profile"], metadata["latent"], 0)
    generator.load_arrays(arrays)
    return generator
