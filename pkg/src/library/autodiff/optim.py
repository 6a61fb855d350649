"""
Adam optimizer for lists of leaf tensors.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Sequence

import numpy as np

if TYPE_CHECKING:
    from numpy.typing import NDArray

    from library.autodiff.tensor import Tensor


@dataclass
class AdamState:
    """
    Moment accumulators and hyperparameters of Adam.

    :param lr: Learning rate.
    :param beta1: Decay of the first moment.
    :param beta2: Decay of the second moment.
    :param eps: Added to the root of the second moment.
    :param step: Number of updates performed so far.
    :param m: First moments, one array per parameter.
    :param v: Second moments, one array per parameter.
    """
    lr: float
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: list[NDArray] = field(default_factory=list)
    v: list[NDArray] = field(default_factory=list)

    @classmethod
    def for_params(cls, params: Sequence[Tensor], lr: float, **kwargs) -> AdamState:
        """Create a state with zero moments shaped like ``params``."""
        return cls(
            lr=lr,
            m=[np.zeros(p.shape, dtype=np.float64) for p in params],
            v=[np.zeros(p.shape, dtype=np.float64) for p in params],
            **kwargs,
        )


def adam_step(params: Sequence[Tensor], state: AdamState) -> Sequence[Tensor]:
    """
    Apply one bias-corrected Adam update in place.

    Parameters without a gradient are left untouched.

    :param params: Leaf tensors whose ``grad`` was populated.
    :param state: Optimizer state, updated in place.
    :return: The updated parameters.
    """
    state.step += 1
    correction1 = 1 - state.beta1**state.step
    correction2 = 1 - state.beta2**state.step
    for i, param in enumerate(params):
        if param.grad is None:
            continue
        grad = param.grad.astype(np.float64)
        state.m[i] = state.beta1 * state.m[i] + (1 - state.beta1) * grad
        state.v[i] = state.beta2 * state.v[i] + (1 - state.beta2) * grad**2
        m_hat = state.m[i] / correction1
        v_hat = state.v[i] / correction2
        update = state.lr * m_hat / (np.sqrt(v_hat) + state.eps)
        param.data = (param.data - update).astype(param.data.dtype)
    return params


def zero_grad(params: Sequence[Tensor]) -> None:
    for param in params:
        param.zero_grad()
