"""
Dense tensors with reverse-mode gradient tracking.

Every operation in :mod:`library.autodiff.ops` returns a new
:class:`Tensor`. If any input requires a gradient, the result records a
:class:`Node` holding its inputs and a backward closure that maps the
gradient of the result onto the gradients of the inputs. Calling
:func:`backward` on a scalar walks these nodes in reverse topological
order and accumulates ``grad`` on every tensor that requires one.

Complex tensors use the convention that the gradient of a real loss L
with respect to z is ``dL/dRe(z) + 1j * dL/dIm(z)``.
"""
from __future__ import annotations

import contextlib
from typing import TYPE_CHECKING, Callable, Iterator, Sequence

import numpy as np

from library.exceptions import DataError, GraphConsumedError

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, DTypeLike, NDArray

BackwardFn = Callable[["NDArray"], Sequence["NDArray | None"]]

_state = {"dtype": np.float32, "grad_enabled": True}


@contextlib.contextmanager
def default_dtype(dtype: DTypeLike) -> Iterator[None]:
    """
    Temporarily change the real dtype of newly created tensors.

    :param dtype: ``np.float32`` or ``np.float64``.
    """
    previous = _state["dtype"]
    _state["dtype"] = np.dtype(dtype).type
    try:
        yield
    finally:
        _state["dtype"] = previous


@contextlib.contextmanager
def no_grad() -> Iterator[None]:
    """Disable graph recording inside the context."""
    previous = _state["grad_enabled"]
    _state["grad_enabled"] = False
    try:
        yield
    finally:
        _state["grad_enabled"] = previous


def grad_enabled() -> bool:
    return _state["grad_enabled"]


def real_dtype() -> type:
    return _state["dtype"]


def complex_dtype() -> type:
    return np.complex64 if _state["dtype"] == np.float32 else np.complex128


def as_array(data: ArrayLike) -> NDArray:
    """Convert to an array of the current default real or complex dtype."""
    if np.iscomplexobj(data):
        return np.asarray(data, dtype=complex_dtype())
    return np.asarray(data, dtype=real_dtype())


class Node:
    """
    One recorded operation of a graph.

    :param op: Name of the operation.
    :param inputs: The input tensors.
    :param backward_fn: Maps the output gradient to one gradient per
        input, None for inputs without gradient.
    """
    __slots__ = ("op", "inputs", "backward_fn", "consumed")

    def __init__(self, op: str, inputs: Sequence[Tensor], backward_fn: BackwardFn):
        self.op = op
        self.inputs = tuple(inputs)
        self.backward_fn = backward_fn
        self.consumed = False

    def __repr__(self) -> str:
        return f"Node({self.op}, {len(self.inputs)} inputs)"


class Tensor:
    """
    An array with an optional gradient.

    Leaves that require a gradient allocate a zero ``grad`` at
    construction. Results of operations receive their ``grad`` during
    :func:`backward`.

    :param data: Array-like values.
    :param requires_grad: Whether gradients are accumulated.
    """

    def __init__(self, data: ArrayLike, requires_grad: bool = False):
        self.data = as_array(data)
        self.requires_grad = requires_grad
        self.grad: NDArray | None = (
            np.zeros_like(self.data) if requires_grad else None
        )
        self._node: Node | None = None

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def is_leaf(self) -> bool:
        return self._node is None

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.data)

    def numpy(self) -> NDArray:
        """Return a copy of the values."""
        return self.data.copy()

    def item(self) -> float:
        return float(self.data.reshape(-1)[0].real)

    def detach(self) -> Tensor:
        """Return a leaf sharing the values but not the graph."""
        return Tensor(self.data)

    def zero_grad(self) -> None:
        if self.requires_grad:
            self.grad = np.zeros_like(self.data)

    def __repr__(self) -> str:
        op = self._node.op if self._node is not None else "leaf"
        return (
            f"Tensor(shape={self.shape}, dtype={self.data.dtype}, "
            f"requires_grad={self.requires_grad}, op={op})"
        )


def from_op(
    data: NDArray, inputs: Sequence[Tensor], backward_fn: BackwardFn, op: str
) -> Tensor:
    """
    Wrap the result of an operation and record it if needed.

    :param data: The computed values.
    :param inputs: The input tensors of the operation.
    :param backward_fn: The backward closure.
    :param op: Name of the operation.
    :return: The result tensor.
    """
    out = Tensor.__new__(Tensor)
    out.data = data
    out.grad = None
    out._node = None
    out.requires_grad = grad_enabled() and any(t.requires_grad for t in inputs)
    if out.requires_grad:
        out._node = Node(op, inputs, backward_fn)
    return out


def _topological_order(root: Tensor) -> list[Tensor]:
    """Return all tensors of the graph, inputs before outputs."""
    order: list[Tensor] = []
    visited: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(root, False)]
    while stack:
        tensor, expanded = stack.pop()
        if expanded:
            order.append(tensor)
            continue
        if id(tensor) in visited:
            continue
        visited.add(id(tensor))
        stack.append((tensor, True))
        if tensor._node is not None:
            for child in tensor._node.inputs:
                if child.requires_grad and id(child) not in visited:
                    stack.append((child, False))
    return order


def _reduce_dtype(grad: NDArray, tensor: Tensor) -> NDArray:
    """Match the gradient to the tensor's kind (real tensors get real grads)."""
    if not tensor.is_complex and np.iscomplexobj(grad):
        grad = grad.real
    return grad.astype(tensor.data.dtype, copy=False)


def backward(loss: Tensor) -> None:
    """
    Accumulate d(loss)/dx into every tensor of the graph.

    :param loss: A tensor with exactly one element.
    :raises DataError: If the loss is not a scalar.
    :raises GraphConsumedError: If the graph was already differentiated.
    """
    if loss.data.size != 1:
        raise DataError(
            f"Backward needs a scalar loss, got shape {loss.shape}."
        )
    if not loss.requires_grad:
        return
    order = _topological_order(loss)
    nodes = [t._node for t in order if t._node is not None]
    if any(node.consumed for node in nodes):
        raise GraphConsumedError(
            "Graph was already differentiated; rebuild it with a new "
            "forward pass."
        )
    grads: dict[int, NDArray] = {id(loss): np.ones_like(loss.data)}
    for tensor in reversed(order):
        grad = grads.pop(id(tensor), None)
        if grad is None:
            continue
        grad = _reduce_dtype(grad, tensor)
        if tensor.grad is None:
            tensor.grad = grad.copy()
        else:
            tensor.grad = tensor.grad + grad
        node = tensor._node
        if node is None:
            continue
        input_grads = node.backward_fn(grad)
        for child, child_grad in zip(node.inputs, input_grads):
            if child_grad is None or not child.requires_grad:
                continue
            if id(child) in grads:
                grads[id(child)] = grads[id(child)] + child_grad
            else:
                grads[id(child)] = child_grad
    for node in nodes:
        node.consumed = True
