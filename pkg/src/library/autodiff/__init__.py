from library.autodiff import checkpoint, ops, optim, tensor

__all__ = ("checkpoint", "ops", "optim", "tensor")
