"""
Test the Adam optimizer and checkpoints.
"""
import numpy as np
import pytest

from library.autodiff import checkpoint, optim
from library.autodiff.tensor import Tensor, default_dtype
from library.exceptions import DataError


def _param(values, grad):
    param = Tensor(np.asarray(values, dtype=float), requires_grad=True)
    param.grad = np.asarray(grad, dtype=param.data.dtype)
    return param


def test_zero_gradient_leaves_params_unchanged():
    """Zero gradients produce zero updates."""
    param = _param([1.0, -2.0], [0.0, 0.0])
    state = optim.AdamState.for_params([param], lr=0.1)
    for _ in range(5):
        optim.adam_step([param], state)
    np.testing.assert_array_equal(param.data, [1.0, -2.0])
    assert state.step == 5


def test_constant_gradient_matches_recurrence():
    """Updates follow the scalar Adam recurrence."""
    lr, beta1, beta2, eps, g = 0.01, 0.9, 0.999, 1e-8, 0.3
    with default_dtype(np.float64):
        param = _param([0.0], [g])
        state = optim.AdamState.for_params([param], lr=lr)
        expected, m, v = 0.0, 0.0, 0.0
        for step in range(1, 11):
            optim.adam_step([param], state)
            m = beta1 * m + (1 - beta1) * g
            v = beta2 * v + (1 - beta2) * g**2
            expected -= lr * (m / (1 - beta1**step)) / (
                np.sqrt(v / (1 - beta2**step)) + eps
            )
            assert param.data[0] == pytest.approx(expected, rel=1e-12)
    # bias correction makes every step close to lr
    assert param.data[0] == pytest.approx(-10 * lr, rel=1e-6)


def test_zero_betas_give_sign_steps():
    """Without moment decay the step is lr times the gradient sign."""
    with default_dtype(np.float64):
        param = _param([1.0, 1.0, 1.0], [2.0, -0.5, 0.0])
        state = optim.AdamState.for_params([param], lr=0.1, beta1=0.0, beta2=0.0)
        optim.adam_step([param], state)
    np.testing.assert_allclose(param.data, [0.9, 1.1, 1.0], atol=1e-7)


def test_zero_grad():
    """zero_grad resets accumulated gradients."""
    param = _param([1.0], [3.0])
    optim.zero_grad([param])
    np.testing.assert_array_equal(param.grad, [0.0])


def test_checkpoint_round_trip(tmp_path):
    """Arrays and metadata survive a round trip at single precision."""
    rng = np.random.default_rng(0)
    arrays = {
        "generator.w0": rng.normal(size=(3, 2, 4, 4, 4)),
        "generator.bn0.running_mean": rng.normal(size=3),
    }
    metadata = {"profile": "desk", "latent_dim": 100}
    checkpoint.save_checkpoint(tmp_path / "model", arrays, metadata)
    loaded, loaded_metadata = checkpoint.load_checkpoint(tmp_path / "model")
    assert loaded_metadata == metadata
    assert list(loaded) == list(arrays)
    for name, values in arrays.items():
        np.testing.assert_array_equal(loaded[name], values.astype(np.float32))


def test_checkpoint_truncated(tmp_path):
    """A truncated blob raises."""
    checkpoint.save_checkpoint(tmp_path / "model", {"w": np.ones(10)})
    blob = tmp_path / "model.bin"
    blob.write_bytes(blob.read_bytes()[:-8])
    with pytest.raises(DataError):
        checkpoint.load_checkpoint(tmp_path / "model.json")
