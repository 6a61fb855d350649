"""
Generator and discriminator of the 3D pore GAN.

Both networks are described by a profile (see
:data:`library.constants.PROFILES`) fixing the cube side ``S`` and a
divisor applied to every hidden channel count. The generator lifts the
latent vector to side ``S / 16`` and then doubles the side four times.
The discriminator halves the side four times and reduces the remaining
``S / 16`` cube to a single logit.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from library import constants
from library.autodiff import ops
from library.autodiff.tensor import Tensor
from library.exceptions import ConfigError, ShapeMismatch

if TYPE_CHECKING:
    from numpy.typing import NDArray

GENERATOR_CHANNELS = (512, 256, 128, 64)
DISCRIMINATOR_CHANNELS = (16, 32, 64, 128)
OUTPUT_CHANNELS = 2
LATENT_SIZE = 100
INIT_STD = 0.02


def profile_geometry(profile: str) -> tuple[int, int]:
    """
    Return cube side and channel divisor of a profile.

    :param profile: ``"full"`` or ``"desk"``.
    :raises ConfigError: For unknown profiles.
    :return: Tuple of side and divisor.
    """
    try:
        entry = constants.PROFILES[profile]
    except KeyError:
        raise ConfigError(
            f"Unknown network profile {profile!r}; choose from "
            f"{', '.join(constants.PROFILES)}."
        )
    return entry["side"], entry["channel_divisor"]


def _weight(rng: np.random.Generator, shape: tuple[int, ...]) -> Tensor:
    return Tensor(rng.normal(0.0, INIT_STD, size=shape), requires_grad=True)


@dataclass
class Generator:
    """
    Five transposed convolutions from latent vectors to probability cubes.

    :param side: Side S of the generated cubes.
    :param latent: Length of the latent vectors.
    :param weights: Kernels by layer name, shape (C_in, C_out, k, k, k).
    :param gammas: Batch normalization scales of layers 1 to 4.
    :param betas: Batch normalization shifts of layers 1 to 4.
    :param norms: Running statistics of layers 1 to 4.
    """
    side: int
    latent: int
    weights: list[Tensor]
    gammas: list[Tensor]
    betas: list[Tensor]
    norms: list[ops.BatchNormState] = field(default_factory=list)

    @classmethod
    def initialize(
        cls,
        profile: str = "desk",
        latent: int = LATENT_SIZE,
        rng: np.random.Generator | int | None = None,
    ) -> Generator:
        """
        Create a generator with DCGAN initialization.

        Kernels are drawn from N(0, 0.02), normalization scales from
        N(1, 0.02), shifts start at zero.
        """
        rng = np.random.default_rng(rng)
        side, divisor = profile_geometry(profile)
        channels = [latent] + [c // divisor for c in GENERATOR_CHANNELS]
        channels.append(OUTPUT_CHANNELS)
        kernels = [side // 16] + [4] * 4
        weights = [
            _weight(rng, (channels[i], channels[i + 1]) + (kernels[i], ) * 3)
            for i in range(5)
        ]
        hidden = channels[1:5]
        gammas = [
            Tensor(rng.normal(1.0, INIT_STD, size=c), requires_grad=True)
            for c in hidden
        ]
        betas = [Tensor(np.zeros(c), requires_grad=True) for c in hidden]
        norms = [ops.BatchNormState.for_channels(c) for c in hidden]
        return cls(side, latent, weights, gammas, betas, norms)

    def parameters(self) -> list[Tensor]:
        return self.weights + self.gammas + self.betas

    def set_training(self, training: bool) -> None:
        for norm in self.norms:
            norm.training = training

    def __call__(self, z: Tensor) -> Tensor:
        """
        Map latent vectors to two-channel probability cubes.

        :param z: Tensor of shape (N, latent).
        :return: Tensor of shape (N, 2, S, S, S); channels sum to one.
        """
        if z.ndim != 2 or z.shape[1] != self.latent:
            raise ShapeMismatch("generator", z.shape, (-1, self.latent))
        x = ops.reshape(z, (z.shape[0], self.latent, 1, 1, 1))
        x = ops.conv3d_transpose(x, self.weights[0], stride=1, padding=0)
        for i in range(4):
            x = ops.batchnorm(x, self.gammas[i], self.betas[i], self.norms[i])
            x = ops.relu(x)
            x = ops.conv3d_transpose(x, self.weights[i + 1], stride=2, padding=1)
        return ops.softmax_channel(x)

    def state_arrays(self) -> dict[str, NDArray]:
        """Parameters and running statistics by name."""
        arrays = {f"weight{i}": w.data for i, w in enumerate(self.weights)}
        for i, norm in enumerate(self.norms):
            arrays[f"gamma{i}"] = self.gammas[i].data
            arrays[f"beta{i}"] = self.betas[i].data
            arrays[f"running_mean{i}"] = norm.running_mean
            arrays[f"running_var{i}"] = norm.running_var
        return arrays

    def load_arrays(self, arrays: dict[str, NDArray]) -> None:
        """Overwrite parameters and statistics with ``arrays``."""
        for i, weight in enumerate(self.weights):
            weight.data = np.asarray(arrays[f"weight{i}"], dtype=weight.data.dtype)
        for i, norm in enumerate(self.norms):
            self.gammas[i].data = np.asarray(
                arrays[f"gamma{i}"], dtype=self.gammas[i].data.dtype
            )
            self.betas[i].data = np.asarray(
                arrays[f"beta{i}"], dtype=self.betas[i].data.dtype
            )
            norm.running_mean = np.asarray(arrays[f"running_mean{i}"], dtype=np.float64)
            norm.running_var = np.asarray(arrays[f"running_var{i}"], dtype=np.float64)


@dataclass
class Discriminator:
    """
    Four halving convolutions and a final reduction to one logit.

    :param side: Side S of the judged cubes.
    :param weights: Kernels, shape (C_out, C_in, k, k, k).
    :param bias: Bias of the logit, shape (1, ).
    :param slope: Slope of the leaky ReLU.
    """
    side: int
    weights: list[Tensor]
    bias: Tensor
    slope: float = 0.2

    @classmethod
    def initialize(
        cls, profile: str = "desk", rng: np.random.Generator | int | None = None
    ) -> Discriminator:
        rng = np.random.default_rng(rng)
        side, divisor = profile_geometry(profile)
        channels = [OUTPUT_CHANNELS] + [c // divisor for c in DISCRIMINATOR_CHANNELS]
        channels.append(1)
        kernels = [4] * 4 + [side // 16]
        weights = [
            _weight(rng, (channels[i + 1], channels[i]) + (kernels[i], ) * 3)
            for i in range(5)
        ]
        return cls(side, weights, Tensor(np.zeros(1), requires_grad=True))

    def parameters(self) -> list[Tensor]:
        return self.weights + [self.bias]

    def logits(self, cubes: Tensor) -> Tensor:
        """
        Unnormalized scores of real against generated.

        :param cubes: Tensor of shape (N, 2, S, S, S).
        :return: Tensor of shape (N, ).
        """
        expected = (OUTPUT_CHANNELS, ) + (self.side, ) * 3
        if cubes.ndim != 5 or cubes.shape[1:] != expected:
            raise ShapeMismatch("discriminator", cubes.shape, (-1, ) + expected)
        x = cubes
        for weight in self.weights[:4]:
            x = ops.leaky_relu(ops.conv3d(x, weight, stride=2, padding=1), self.slope)
        x = ops.conv3d(x, self.weights[4], stride=1, padding=0)
        x = ops.reshape(x, (cubes.shape[0], 1))
        return ops.reshape(ops.add_bias(x, self.bias), (cubes.shape[0], ))

    def __call__(self, cubes: Tensor) -> Tensor:
        """Probability that each cube is real, in (0, 1)."""
        return ops.sigmoid(self.logits(cubes))

    def state_arrays(self) -> dict[str, NDArray]:
        arrays = {f"weight{i}": w.data for i, w in enumerate(self.weights)}
        arrays["bias"] = self.bias.data
        return arrays

    def load_arrays(self, arrays: dict[str, NDArray]) -> None:
        for i, weight in enumerate(self.weights):
            weight.data = np.asarray(arrays[f"weight{i}"], dtype=weight.data.dtype)
        self.bias.data = np.asarray(arrays["bias"], dtype=self.bias.data.dtype)
