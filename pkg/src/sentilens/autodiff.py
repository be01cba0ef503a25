"""Minimal dense-tensor reverse-mode automatic differentiation.

A global tape records every primitive executed while gradients are
enabled, in execution order (which is already a topological order of the
dependency graph). ``backward`` walks the tape in reverse, accumulating
gradients additively into ``Tensor.grad``, then clears the tape; a second
``backward`` without a fresh forward pass is an error.

Only the primitives the classifier needs are provided: matrix multiply,
broadcasting add/multiply, tanh, logistic sigmoid, (masked) softmax,
concatenation/stacking, row gather for embedding lookup, timestep and
column slicing, inverted dropout, clamped log, sum, and reshape.

Numerics default to float64; constants created to interact with a tensor
inherit its dtype, so a float32 model stays float32 throughout.
"""

import contextlib

import numpy as np

DEFAULT_DTYPE = np.float64


class Tensor:
    """Shape-carrying dense array, optionally tracked for gradients.

    ``grad`` is allocated eagerly (zeros) for tensors created with
    ``requires_grad=True`` (parameters), and lazily for intermediates:
    ``grad is None`` means "no gradient accumulated yet".
    """

    __slots__ = ("values", "grad", "requires_grad")

    def __init__(self, values, requires_grad=False, dtype=None):
        arr = np.asarray(values)
        if dtype is not None:
            arr = arr.astype(dtype, copy=False)
        elif arr.dtype.kind != "f":
            arr = arr.astype(DEFAULT_DTYPE)
        self.values = arr
        self.requires_grad = bool(requires_grad)
        self.grad = np.zeros_like(arr) if requires_grad else None

    @property
    def shape(self):
        return self.values.shape

    @property
    def size(self):
        return self.values.size

    @property
    def dtype(self):
        return self.values.dtype

    def zero_grad(self):
        if self.requires_grad:
            self.grad = np.zeros_like(self.values)

    def __repr__(self):
        return f"Tensor(shape={self.values.shape}, requires_grad={self.requires_grad})"

    # Operator sugar; all arithmetic goes through the module primitives.
    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(other, self)

    def __matmul__(self, other):
        return matmul(self, other)

    def __neg__(self):
        return mul(self, -1.0)

    def __sub__(self, other):
        return add(self, mul(other, -1.0))


class _Tape:
    def __init__(self):
        self.entries = []  # (output Tensor, backward closure), execution order


_TAPE = _Tape()
_GRAD_ENABLED = True


@contextlib.contextmanager
def no_grad():
    """Disable tape recording inside the block (inference, probes)."""
    global _GRAD_ENABLED
    prev = _GRAD_ENABLED
    _GRAD_ENABLED = False
    try:
        yield
    finally:
        _GRAD_ENABLED = prev


def tape_size() -> int:
    return len(_TAPE.entries)


def clear_tape():
    _TAPE.entries.clear()


def as_tensor(x, like: Tensor = None) -> Tensor:
    """Coerce array-likes to constant tensors, matching ``like``'s dtype."""
    if isinstance(x, Tensor):
        return x
    dtype = like.dtype if like is not None else None
    return Tensor(x, requires_grad=False, dtype=dtype)


def _make_output(values, inputs, backward_fn) -> Tensor:
    out = Tensor(values)
    if _GRAD_ENABLED and any(t.requires_grad for t in inputs):
        out.requires_grad = True
        _TAPE.entries.append((out, backward_fn))
    return out


def _accumulate(t: Tensor, g):
    if not t.requires_grad:
        return
    if t.grad is None:
        t.grad = np.zeros_like(t.values)
    t.grad += g


def _unbroadcast(g, shape):
    """Reduce a broadcast gradient back to ``shape`` by summation."""
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for axis, n in enumerate(shape):
        if n == 1 and g.shape[axis] != 1:
            g = g.sum(axis=axis, keepdims=True)
    return g


# ---------------------------------------------------------------------------
# Primitives
# ---------------------------------------------------------------------------


def add(a, b) -> Tensor:
    a = as_tensor(a, like=b if isinstance(b, Tensor) else None)
    b = as_tensor(b, like=a)
    values = a.values + b.values

    def backward_fn(g):
        _accumulate(a, _unbroadcast(g, a.values.shape))
        _accumulate(b, _unbroadcast(g, b.values.shape))

    return _make_output(values, (a, b), backward_fn)


def mul(a, b) -> Tensor:
    a = as_tensor(a, like=b if isinstance(b, Tensor) else None)
    b = as_tensor(b, like=a)
    values = a.values * b.values

    def backward_fn(g):
        if a.requires_grad:
            _accumulate(a, _unbroadcast(g * b.values, a.values.shape))
        if b.requires_grad:
            _accumulate(b, _unbroadcast(g * a.values, b.values.shape))

    return _make_output(values, (a, b), backward_fn)


def matmul(a, b) -> Tensor:
    """``a @ b`` where ``b`` is a 2-D weight and ``a`` is 2-D or batched 3-D."""
    a = as_tensor(a)
    b = as_tensor(b, like=a)
    if b.values.ndim != 2:
        raise ValueError("matmul expects a 2-D right operand")
    if a.values.shape[-1] != b.values.shape[0]:
        raise ValueError(
            f"matmul inner dimensions differ: {a.values.shape} @ {b.values.shape}"
        )
    values = a.values @ b.values

    def backward_fn(g):
        if a.requires_grad:
            _accumulate(a, g @ b.values.T)
        if b.requires_grad:
            axes = (tuple(range(a.values.ndim - 1)), tuple(range(g.ndim - 1)))
            _accumulate(b, np.tensordot(a.values, g, axes=axes))

    return _make_output(values, (a, b), backward_fn)


def tanh(x) -> Tensor:
    x = as_tensor(x)
    y = np.tanh(x.values)

    def backward_fn(g):
        _accumulate(x, g * (1.0 - y * y))

    return _make_output(y, (x,), backward_fn)


def sigmoid(x) -> Tensor:
    x = as_tensor(x)
    with np.errstate(over="ignore"):
        y = 1.0 / (1.0 + np.exp(-x.values))

    def backward_fn(g):
        _accumulate(x, g * y * (1.0 - y))

    return _make_output(y, (x,), backward_fn)


def log_clamped(x, floor: float = 1e-12) -> Tensor:
    """Natural log with the argument floored at ``floor``; the derivative
    uses the floored argument so zero probabilities stay finite."""
    x = as_tensor(x)
    safe = np.maximum(x.values, floor)
    values = np.log(safe)

    def backward_fn(g):
        _accumulate(x, g / safe)

    return _make_output(values, (x,), backward_fn)


def _softmax_values(z, axis):
    shifted = z - np.max(z, axis=axis, keepdims=True)
    e = np.exp(shifted)
    return e / np.sum(e, axis=axis, keepdims=True)


def softmax(x, axis: int = -1) -> Tensor:
    x = as_tensor(x)
    y = _softmax_values(x.values, axis)

    def backward_fn(g):
        inner = np.sum(g * y, axis=axis, keepdims=True)
        _accumulate(x, y * (g - inner))

    return _make_output(y, (x,), backward_fn)


def masked_softmax(x, mask, axis: int = -1) -> Tensor:
    """Softmax over positions where ``mask`` is true; masked positions get
    exactly zero output. Every slice along ``axis`` needs >= 1 valid entry."""
    x = as_tensor(x)
    valid = np.asarray(mask, dtype=bool)
    if valid.shape != x.values.shape:
        raise ValueError("mask shape must match input shape")
    if not np.all(np.any(valid, axis=axis)):
        raise ValueError("masked_softmax: some row has no valid positions")
    masked = np.where(valid, x.values, -np.inf)
    shifted = masked - np.max(masked, axis=axis, keepdims=True)
    e = np.exp(shifted)  # exp(-inf) = 0 exactly at masked positions
    y = e / np.sum(e, axis=axis, keepdims=True)

    def backward_fn(g):
        inner = np.sum(g * y, axis=axis, keepdims=True)
        _accumulate(x, y * (g - inner))

    return _make_output(y, (x,), backward_fn)


def concat(tensors, axis: int = -1) -> Tensor:
    tensors = [as_tensor(t) for t in tensors]
    values = np.concatenate([t.values for t in tensors], axis=axis)
    sizes = [t.values.shape[axis] for t in tensors]
    offsets = np.cumsum(sizes)[:-1]

    def backward_fn(g):
        for t, piece in zip(tensors, np.split(g, offsets, axis=axis)):
            _accumulate(t, piece)

    return _make_output(values, tuple(tensors), backward_fn)


def stack(tensors, axis: int = 1) -> Tensor:
    tensors = [as_tensor(t) for t in tensors]
    values = np.stack([t.values for t in tensors], axis=axis)

    def backward_fn(g):
        for i, t in enumerate(tensors):
            _accumulate(t, np.take(g, i, axis=axis))

    return _make_output(values, tuple(tensors), backward_fn)


def gather_rows(table, indices) -> Tensor:
    """Row gather (embedding lookup): output shape = indices.shape + (d,)."""
    table = as_tensor(table)
    idx = np.asarray(indices)
    if idx.size and (idx.min() < 0 or idx.max() >= table.values.shape[0]):
        raise IndexError(
            f"gather index out of bounds for table with {table.values.shape[0]} rows"
        )
    values = table.values[idx]

    def backward_fn(g):
        if table.requires_grad:
            if table.grad is None:
                table.grad = np.zeros_like(table.values)
            np.add.at(table.grad, idx, g)

    return _make_output(values, (table,), backward_fn)


def timestep(x, t: int) -> Tensor:
    """Select position ``t`` along axis 1 of a (batch, steps, dim) tensor."""
    x = as_tensor(x)

    def backward_fn(g):
        if x.requires_grad:
            if x.grad is None:
                x.grad = np.zeros_like(x.values)
            x.grad[:, t, :] += g

    return _make_output(x.values[:, t, :], (x,), backward_fn)


def slice_cols(x, start: int, stop: int) -> Tensor:
    """Column slice of a 2-D tensor (gate-block extraction)."""
    x = as_tensor(x)

    def backward_fn(g):
        if x.requires_grad:
            if x.grad is None:
                x.grad = np.zeros_like(x.values)
            x.grad[:, start:stop] += g

    return _make_output(x.values[:, start:stop], (x,), backward_fn)


def dropout(x, rate: float, rng: np.random.Generator, training: bool) -> Tensor:
    """Inverted dropout: scales kept activations by 1/keep so the expected
    output equals the input; identity when not training."""
    if not 0.0 <= rate < 1.0:
        raise ValueError(f"dropout rate must be in [0, 1), got {rate}")
    x = as_tensor(x)
    if not training or rate == 0.0:
        return x
    keep = 1.0 - rate
    mask = (rng.random(x.values.shape) < keep).astype(x.values.dtype) / keep
    values = x.values * mask

    def backward_fn(g):
        _accumulate(x, g * mask)

    return _make_output(values, (x,), backward_fn)


def tsum(x, axis=None, keepdims: bool = False) -> Tensor:
    x = as_tensor(x)
    values = np.sum(x.values, axis=axis, keepdims=keepdims)

    def backward_fn(g):
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        _accumulate(x, np.broadcast_to(g, x.values.shape).copy())

    return _make_output(values, (x,), backward_fn)


def reshape(x, shape) -> Tensor:
    x = as_tensor(x)

    def backward_fn(g):
        _accumulate(x, g.reshape(x.values.shape))

    return _make_output(x.values.reshape(shape), (x,), backward_fn)


# ---------------------------------------------------------------------------
# Backward pass and gradient checking
# ---------------------------------------------------------------------------


def backward(loss: Tensor):
    """Propagate gradients from a scalar loss through the recorded tape.

    Gradients add into ``grad`` fields (so successive backward passes from
    fresh forward passes accumulate); the tape is cleared afterwards.
    """
    if not isinstance(loss, Tensor) or loss.values.size != 1:
        raise ValueError("backward requires a scalar loss tensor")
    if not _TAPE.entries:
        raise RuntimeError(
            "no operations on tape; run a forward pass before each backward"
        )
    loss.grad = np.ones_like(loss.values)
    for out, backward_fn in reversed(_TAPE.entries):
        if out.grad is not None:
            backward_fn(out.grad)
    _TAPE.entries.clear()


def grad_check(forward, parameters, epsilon: float = 1e-5) -> float:
    """Compare analytic gradients against central finite differences.

    ``forward`` must be a deterministic closure returning a scalar loss
    tensor (dropout disabled); determinism is verified by evaluating it
    twice. Returns the maximum relative error over every parameter
    element, with |analytic - numeric| / max(|analytic|, |numeric|, 1e-8).
    """
    with no_grad():
        probe_a = float(forward().values)
        probe_b = float(forward().values)
    if not (np.isfinite(probe_a) and np.isfinite(probe_b)):
        raise FloatingPointError("forward produced non-finite loss")
    if probe_a != probe_b:
        raise RuntimeError(
            "forward is not deterministic; disable dropout before grad_check"
        )

    for p in parameters:
        p.zero_grad()
    clear_tape()
    backward(forward())
    analytic = [p.grad.copy() for p in parameters]

    max_err = 0.0
    for p, grads in zip(parameters, analytic):
        flat_values = p.values.reshape(-1)
        flat_grads = grads.reshape(-1)
        for i in range(flat_values.size):
            original = flat_values[i]
            flat_values[i] = original + epsilon
            with no_grad():
                f_plus = float(forward().values)
            flat_values[i] = original - epsilon
            with no_grad():
                f_minus = float(forward().values)
            flat_values[i] = original
            if not (np.isfinite(f_plus) and np.isfinite(f_minus)):
                raise FloatingPointError("non-finite value during finite differences")
            numeric = (f_plus - f_minus) / (2.0 * epsilon)
            denom = max(abs(flat_grads[i]), abs(numeric), 1e-8)
            max_err = max(max_err, abs(flat_grads[i] - numeric) / denom)
    return max_err
