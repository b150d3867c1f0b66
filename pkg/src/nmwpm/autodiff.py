"""Reverse-mode automatic differentiation over dense float32 arrays.

The graph is micrograd-shaped: every op returns a Tensor holding its value,
its parents, and a closure that pushes the output gradient one step back.
``backward(loss)`` runs the closures in reverse topological order, then
frees the graph — gradients of a single pass is all training needs, and
dropping the references keeps memory flat across shots.

Values and gradients are float32; reductions and normalization statistics
accumulate in float64 before casting back.
"""

from __future__ import annotations

import numpy as np
from scipy.special import erf

_F32 = np.float32
_SQRT2 = np.float64(np.sqrt(2.0))


class Tensor:
    """A dense array plus an optional backprop record."""

    __slots__ = ("values", "grad", "_parents", "_backprop")

    def __init__(self, values, _parents=()):
        self.values = np.asarray(values, dtype=_F32)
        self.grad: np.ndarray | None = None
        self._parents: tuple[Tensor, ...] = _parents
        self._backprop = None

    @property
    def shape(self):
        return self.values.shape

    def __repr__(self):
        return f"Tensor(shape={self.values.shape})"

    # small conveniences; the real API is the module-level primitives
    def __add__(self, other):
        return add(self, other)

    def __mul__(self, other):
        return mul(self, other)

    def __neg__(self):
        return neg(self)

    def __sub__(self, other):
        return add(self, neg(_wrap(other)))

    def __matmul__(self, other):
        return matmul(self, other)


def _wrap(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def _accum(t: Tensor, g: np.ndarray) -> None:
    if t.grad is None:
        t.grad = np.zeros(t.values.shape, dtype=_F32)
    t.grad += g.astype(_F32, copy=False)


def _unbroadcast(g: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    # reduce a broadcasted gradient back onto `shape`
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for ax, n in enumerate(shape):
        if n == 1 and g.shape[ax] != 1:
            g = g.sum(axis=ax, keepdims=True)
    return g


# --- primitives ----------------------------------------------------------


def add(a, b) -> Tensor:
    a, b = _wrap(a), _wrap(b)
    out = Tensor(a.values + b.values, (a, b))

    def backprop():
        _accum(a, _unbroadcast(out.grad, a.values.shape))
        _accum(b, _unbroadcast(out.grad, b.values.shape))
    out._backprop = backprop
    return out


def mul(a, b) -> Tensor:
    a, b = _wrap(a), _wrap(b)
    out = Tensor(a.values * b.values, (a, b))

    def backprop():
        _accum(a, _unbroadcast(out.grad * b.values, a.values.shape))
        _accum(b, _unbroadcast(out.grad * a.values, b.values.shape))
    out._backprop = backprop
    return out


def neg(a) -> Tensor:
    a = _wrap(a)
    out = Tensor(-a.values, (a,))

    def backprop():
        _accum(a, -out.grad)
    out._backprop = backprop
    return out


def matmul(a, b) -> Tensor:
    a, b = _wrap(a), _wrap(b)
    if a.values.ndim != 2 or b.values.ndim != 2:
        raise ValueError(f"matmul wants 2-D operands, got "
                         f"{a.values.shape} @ {b.values.shape}")
    if a.values.shape[1] != b.values.shape[0]:
        raise ValueError(f"matmul shape mismatch: "
                         f"{a.values.shape} @ {b.values.shape}")
    out = Tensor(a.values @ b.values, (a, b))

    def backprop():
        _accum(a, out.grad @ b.values.T)
        _accum(b, a.values.T @ out.grad)
    out._backprop = backprop
    return out


def transpose(a) -> Tensor:
    a = _wrap(a)
    if a.values.ndim != 2:
        raise ValueError(f"transpose wants a 2-D operand, got {a.values.shape}")
    out = Tensor(a.values.T, (a,))

    def backprop():
        _accum(a, out.grad.T)
    out._backprop = backprop
    return out


def concat(tensors, axis: int = -1) -> Tensor:
    tensors = [_wrap(t) for t in tensors]
    out = Tensor(np.concatenate([t.values for t in tensors], axis=axis),
                 tuple(tensors))
    sizes = [t.values.shape[axis] for t in tensors]

    def backprop():
        pieces = np.split(out.grad, np.cumsum(sizes)[:-1], axis=axis)
        for t, g in zip(tensors, pieces):
            _accum(t, g)
    out._backprop = backprop
    return out


def slice_axis(a, axis: int, start: int, stop: int) -> Tensor:
    a = _wrap(a)
    key = [slice(None)] * a.values.ndim
    key[axis] = slice(start, stop)
    key = tuple(key)
    out = Tensor(a.values[key], (a,))

    def backprop():
        g = np.zeros(a.values.shape, dtype=_F32)
        g[key] = out.grad
        _accum(a, g)
    out._backprop = backprop
    return out


def gather_rows(a, indices) -> Tensor:
    a = _wrap(a)
    idx = np.asarray(indices, dtype=np.int64)
    out = Tensor(a.values[idx], (a,))

    def backprop():
        g = np.zeros(a.values.shape, dtype=_F32)
        np.add.at(g, idx, out.grad)   # indices may repeat
        _accum(a, g)
    out._backprop = backprop
    return out


def sum_(a, axis: int | None = None) -> Tensor:
    a = _wrap(a)
    out = Tensor(a.values.sum(axis=axis, dtype=np.float64), (a,))

    def backprop():
        g = out.grad
        if axis is not None:
            g = np.expand_dims(g, axis)
        _accum(a, np.broadcast_to(g, a.values.shape))
    out._backprop = backprop
    return out


def mean(a, axis: int | None = None) -> Tensor:
    a = _wrap(a)
    out = Tensor(a.values.mean(axis=axis, dtype=np.float64), (a,))
    count = a.values.size if axis is None else a.values.shape[axis]

    def backprop():
        g = out.grad
        if axis is not None:
            g = np.expand_dims(g, axis)
        _accum(a, np.broadcast_to(g, a.values.shape) / count)
    out._backprop = backprop
    return out


def max_elementwise(a, b) -> Tensor:
    a, b = _wrap(a), _wrap(b)
    if a.values.shape != b.values.shape:
        raise ValueError(f"max_elementwise wants equal shapes, got "
                         f"{a.values.shape} vs {b.values.shape}")
    out = Tensor(np.maximum(a.values, b.values), (a, b))

    def backprop():
        # strict winner takes the gradient; exact ties split it evenly
        wa = np.where(a.values > b.values, 1.0,
                      np.where(a.values == b.values, 0.5, 0.0)).astype(_F32)
        _accum(a, out.grad * wa)
        _accum(b, out.grad * (1.0 - wa))
    out._backprop = backprop
    return out


def relu(a) -> Tensor:
    a = _wrap(a)
    out = Tensor(np.maximum(a.values, 0.0), (a,))

    def backprop():
        _accum(a, out.grad * (a.values > 0))
    out._backprop = backprop
    return out


def gelu(a) -> Tensor:
    # exact Gaussian form x * Phi(x), not the tanh approximation
    a = _wrap(a)
    x = a.values.astype(np.float64)
    phi = 0.5 * (1.0 + erf(x / _SQRT2))
    out = Tensor(x * phi, (a,))

    def backprop():
        pdf = np.exp(-0.5 * x * x) / np.sqrt(2.0 * np.pi)
        _accum(a, out.grad * (phi + x * pdf))
    out._backprop = backprop
    return out


def sigmoid(a) -> Tensor:
    a = _wrap(a)
    # evaluated in float64: float32 saturates to exactly 0/1 too early for
    # the log-loss built on top of this
    v = 1.0 / (1.0 + np.exp(-a.values.astype(np.float64)))
    out = Tensor(v, (a,))

    def backprop():
        _accum(a, out.grad * (v * (1.0 - v)))
    out._backprop = backprop
    return out


def softmax(a, axis: int = -1) -> Tensor:
    a = _wrap(a)
    shifted = a.values - a.values.max(axis=axis, keepdims=True)
    e = np.exp(shifted.astype(np.float64))
    y = e / e.sum(axis=axis, keepdims=True)
    out = Tensor(y, (a,))

    def backprop():
        g = out.grad.astype(np.float64)
        dot = (g * y).sum(axis=axis, keepdims=True)
        _accum(a, y * (g - dot))
    out._backprop = backprop
    return out


def log(a) -> Tensor:
    a = _wrap(a)
    out = Tensor(np.log(a.values), (a,))

    def backprop():
        _accum(a, out.grad / a.values)
    out._backprop = backprop
    return out


def layer_norm(a, gain, bias, eps: float = 1e-5) -> Tensor:
    """Normalize the last axis to zero mean / unit variance, then scale."""
    a, gain, bias = _wrap(a), _wrap(gain), _wrap(bias)
    d = a.values.shape[-1]
    if gain.values.shape != (d,) or bias.values.shape != (d,):
        raise ValueError(f"gain/bias must have shape ({d},)")
    x = a.values.astype(np.float64)
    mu = x.mean(axis=-1, keepdims=True)
    var = x.var(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    xhat = (x - mu) * inv
    out = Tensor(xhat * gain.values + bias.values, (a, gain, bias))

    def backprop():
        g = out.grad.astype(np.float64)
        _accum(gain, (g * xhat).reshape(-1, d).sum(axis=0))
        _accum(bias, g.reshape(-1, d).sum(axis=0))
        gx = g * gain.values.astype(np.float64)
        dx = inv * (gx - gx.mean(axis=-1, keepdims=True)
                    - xhat * (gx * xhat).mean(axis=-1, keepdims=True))
        _accum(a, dx)
    out._backprop = backprop
    return out


# --- traversal -----------------------------------------------------------


def _topo_order(root: Tensor) -> list[Tensor]:
    order: list[Tensor] = []
    seen: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for p in node._parents:
            if id(p) not in seen:
                stack.append((p, False))
    return order


def backward(loss: Tensor) -> None:
    """Populate .grad on everything the scalar loss depends on.

    Gradients accumulate across calls (clear them between optimizer
    steps); the traversed graph is freed afterwards, so a loss can only
    be walked once.
    """
    if loss.values.size != 1:
        raise ValueError(f"backward needs a scalar loss, got shape "
                         f"{loss.values.shape}")
    order = _topo_order(loss)
    loss.grad = np.ones(loss.values.shape, dtype=_F32)
    for node in reversed(order):
        if node._backprop is not None:
            node._backprop()
    for node in order:
        node._parents = ()
        node._backprop = None
