"""Reverse-mode differentiation over named parameter collections.

A deliberately small tape: enough primitives for MLPs and the losses built
on them (add, multiply, matmul, affine, tanh, SiLU, square, sum, mean,
sqrt, reciprocal, plus reshape/concat plumbing). All arithmetic is float64.
Every operation checks its result for finiteness, so a NaN/inf surfaces as
an error naming the primitive that produced it.

The generic helpers (``tanh``, ``silu`` ...) dispatch on type, so the same
forward code runs on plain ndarrays (used by the finite-difference oracle)
and on tape nodes (used for gradients).
"""

import numpy as np


class EngineError(Exception):
    pass


class UnsupportedPrimitiveError(EngineError):
    def __init__(self, name):
        super().__init__("unsupported primitive: %s" % name)
        self.primitive = name


class NonFiniteError(EngineError):
    def __init__(self, op):
        super().__init__("non-finite value produced by primitive '%s'" % op)
        self.primitive = op


def _unbroadcast(grad, shape):
    """Sum ``grad`` down to ``shape`` (reverse of numpy broadcasting)."""
    grad = np.asarray(grad, dtype=float)
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, n in enumerate(shape):
        if n == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def _sigmoid(x):
    # piecewise form avoids overflow in exp for large |x|
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


class Tensor:
    """One node of the reverse-mode tape."""

    __slots__ = ("value", "grad", "op", "_parents", "_vjps")

    def __init__(self, value, op="leaf", parents=(), vjps=()):
        self.value = np.asarray(value, dtype=float)
        if not np.all(np.isfinite(self.value)):
            raise NonFiniteError(op)
        self.grad = None
        self.op = op
        self._parents = parents
        self._vjps = vjps

    @property
    def shape(self):
        return self.value.shape

    @property
    def ndim(self):
        return self.value.ndim

    # -- primitives ------------------------------------------------------

    def tanh(self):
        y = np.tanh(self.value)
        return Tensor(y, "tanh", (self,), (lambda g: g * (1.0 - y * y),))

    def silu(self):
        x = self.value
        s = _sigmoid(x)
        return Tensor(x * s, "silu", (self,),
                      (lambda g: g * (s * (1.0 + x * (1.0 - s))),))

    def square(self):
        x = self.value
        return Tensor(x * x, "square", (self,), (lambda g: g * (2.0 * x),))

    def sqrt(self):
        if np.any(self.value < 0):
            raise NonFiniteError("sqrt")
        y = np.sqrt(self.value)
        return Tensor(y, "sqrt", (self,), (lambda g: g / (2.0 * y),))

    def reciprocal(self):
        x = self.value
        with np.errstate(divide="ignore"):
            y = 1.0 / x
        return Tensor(y, "reciprocal", (self,),
                      (lambda g: -g / (x * x),))

    def sum(self):
        x = self.value
        return Tensor(x.sum(), "sum", (self,),
                      (lambda g: np.broadcast_to(g, x.shape),))

    def mean(self):
        x = self.value
        return Tensor(x.mean(), "mean", (self,),
                      (lambda g: np.broadcast_to(g / x.size, x.shape),))

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], tuple):
            shape = shape[0]
        old = self.value.shape
        return Tensor(self.value.reshape(shape), "reshape", (self,),
                      (lambda g: np.asarray(g).reshape(old),))

    # -- operators -------------------------------------------------------

    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __mul__(self, other):
        return multiply(self, other)

    __rmul__ = __mul__

    def __sub__(self, other):
        return add(self, multiply(other, -1.0))

    def __rsub__(self, other):
        return add(other, multiply(self, -1.0))

    def __neg__(self):
        return multiply(self, -1.0)

    def __truediv__(self, other):
        return multiply(self, reciprocal(other))

    def __rtruediv__(self, other):
        return multiply(other, self.reciprocal())

    def __matmul__(self, other):
        return matmul(self, other)

    def __rmatmul__(self, other):
        return matmul(other, self)

    def __pow__(self, exponent):
        if exponent == 2:
            return self.square()
        if exponent == 0.5:
            return self.sqrt()
        raise UnsupportedPrimitiveError("pow(%r)" % (exponent,))

    # numpy ufunc hook: route the supported ufuncs through the tape and
    # reject everything else with a named error.
    def __array_ufunc__(self, ufunc, method, *inputs, **kwargs):
        if method != "__call__" or kwargs.get("out") is not None:
            raise UnsupportedPrimitiveError(ufunc.__name__)
        handler = _UFUNC_HANDLERS.get(ufunc)
        if handler is None:
            raise UnsupportedPrimitiveError(ufunc.__name__)
        return handler(*inputs)

    def __repr__(self):
        return "Tensor(op=%s, shape=%s)" % (self.op, self.value.shape)


def _lift(x):
    return x if isinstance(x, Tensor) else Tensor(x, "const")


def add(a, b):
    a, b = _lift(a), _lift(b)
    av, bv = a.value, b.value
    return Tensor(av + bv, "add", (a, b),
                  (lambda g: _unbroadcast(g, av.shape),
                   lambda g: _unbroadcast(g, bv.shape)))


def multiply(a, b):
    a, b = _lift(a), _lift(b)
    av, bv = a.value, b.value
    return Tensor(av * bv, "multiply", (a, b),
                  (lambda g: _unbroadcast(g * bv, av.shape),
                   lambda g: _unbroadcast(g * av, bv.shape)))


def matmul(a, b):
    a, b = _lift(a), _lift(b)
    av, bv = a.value, b.value

    def vjp_a(g):
        g = np.asarray(g)
        if av.ndim == 1 and bv.ndim == 2:
            return g @ bv.T
        if av.ndim == 2 and bv.ndim == 1:
            return np.outer(g, bv)
        if av.ndim == 1 and bv.ndim == 1:
            return g * bv
        return g @ bv.T

    def vjp_b(g):
        g = np.asarray(g)
        if av.ndim == 1 and bv.ndim == 2:
            return np.outer(av, g)
        if av.ndim == 2 and bv.ndim == 1:
            return av.T @ g
        if av.ndim == 1 and bv.ndim == 1:
            return g * av
        return av.T @ g

    return Tensor(av @ bv, "matmul", (a, b), (vjp_a, vjp_b))


def concat(a, b, axis=-1):
    """Concatenate two values along ``axis`` (tape-aware)."""
    if not isinstance(a, Tensor) and not isinstance(b, Tensor):
        return np.concatenate([np.asarray(a, float), np.asarray(b, float)], axis=axis)
    a, b = _lift(a), _lift(b)
    av, bv = a.value, b.value
    ax = axis % av.ndim
    na = av.shape[ax]

    def take(g, start, stop):
        index = [slice(None)] * av.ndim
        index[ax] = slice(start, stop)
        return np.asarray(g)[tuple(index)]

    return Tensor(np.concatenate([av, bv], axis=axis), "concat", (a, b),
                  (lambda g: take(g, 0, na), lambda g: take(g, na, None)))


def affine(x, w, b):
    """x @ w + b."""
    return matmul(x, w) + b


# generic (ndarray | Tensor) math helpers -------------------------------

def tanh(x):
    return x.tanh() if isinstance(x, Tensor) else np.tanh(x)


def silu(x):
    return x.silu() if isinstance(x, Tensor) else x * _sigmoid(x)


def square(x):
    return x.square() if isinstance(x, Tensor) else np.square(x)


def sqrt(x):
    return x.sqrt() if isinstance(x, Tensor) else np.sqrt(x)


def reciprocal(x):
    if isinstance(x, Tensor):
        return x.reciprocal()
    return 1.0 / np.asarray(x, dtype=float)


def value_of(x):
    """Detach: plain ndarray (or scalar) view of a Tensor or array."""
    return x.value if isinstance(x, Tensor) else np.asarray(x, dtype=float)


_UFUNC_HANDLERS = {
    np.add: add,
    np.subtract: lambda a, b: add(a, multiply(b, -1.0)),
    np.multiply: multiply,
    np.true_divide: lambda a, b: multiply(a, reciprocal(_lift(b))),
    np.negative: lambda a: multiply(a, -1.0),
    np.matmul: matmul,
    np.tanh: lambda a: _lift(a).tanh(),
    np.sqrt: lambda a: _lift(a).sqrt(),
    np.square: lambda a: _lift(a).square(),
    np.reciprocal: lambda a: _lift(a).reciprocal(),
}


def backward(out):
    """Accumulate d(out)/d(leaf) into ``.grad`` over the graph below ``out``."""
    if not isinstance(out, Tensor):
        raise EngineError("backward expects a Tensor")
    if out.value.shape != ():
        raise EngineError("backward requires a scalar output")

    order = []
    seen = set()
    stack = [(out, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for parent in node._parents:
            stack.append((parent, False))

    out.grad = np.ones(())
    for node in reversed(order):
        if node.grad is None:
            continue
        for parent, vjp in zip(node._parents, node._vjps):
            g = np.asarray(vjp(node.grad), dtype=float)
            parent.grad = g if parent.grad is None else parent.grad + g


# parameter collections --------------------------------------------------

class ParameterSet:
    """Named, shape-fixed collection of finite float64 arrays."""

    def __init__(self, entries):
        self._entries = {}
        for name, arr in dict(entries).items():
            a = np.array(arr, dtype=float)
            if not np.all(np.isfinite(a)):
                raise ValueError("parameter %r contains non-finite entries" % name)
            self._entries[name] = a

    def __getitem__(self, name):
        return self._entries[name]

    def __contains__(self, name):
        return name in self._entries

    def __iter__(self):
        return iter(self._entries)

    def __len__(self):
        return len(self._entries)

    def names(self):
        return list(self._entries)

    def items(self):
        return self._entries.items()

    def copy(self):
        return type(self)({n: a.copy() for n, a in self._entries.items()})

    def as_dict(self):
        return dict(self._entries)

    def congruent_with(self, other):
        return (set(self._entries) == set(other._entries)
                and all(self._entries[n].shape == other[n].shape
                        for n in self._entries))


class GradientMap(ParameterSet):
    """Gradient arrays, name/shape congruent with their ParameterSet."""


def merge_params(*sets):
    merged = {}
    for pset in sets:
        for name, arr in pset.items():
            if name in merged:
                raise ValueError("duplicate parameter name %r" % name)
            merged[name] = arr
    return ParameterSet(merged)


def evaluate_with_gradients(loss_fn, params):
    """Forward-evaluate ``loss_fn`` and return (value, GradientMap).

    ``loss_fn`` receives a mapping name -> Tensor leaf and must return a
    scalar Tensor built from supported primitives.
    """
    leaves = {name: Tensor(arr.copy()) for name, arr in params.items()}
    out = loss_fn(leaves)
    if not isinstance(out, Tensor):
        raise EngineError("loss function must return a Tensor")
    backward(out)
    grads = {}
    for name, leaf in leaves.items():
        g = leaf.grad
        grads[name] = np.zeros_like(leaf.value) if g is None else np.asarray(g, float)
    return float(out.value), GradientMap(grads)


def finite_difference_gradient(loss_fn, params, step=1e-5):
    """Central-difference gradient oracle, one coordinate at a time."""
    if step <= 0:
        raise ValueError("step must be positive")
    arrays = {name: np.array(arr, dtype=float) for name, arr in params.items()}
    grads = {}
    for name, arr in arrays.items():
        g = np.zeros_like(arr)
        flat = arr.reshape(-1)
        gflat = g.reshape(-1)
        for i in range(flat.size):
            keep = flat[i]
            flat[i] = keep + step
            hi = float(value_of(loss_fn(arrays)))
            flat[i] = keep - step
            lo = float(value_of(loss_fn(arrays)))
            flat[i] = keep
            gflat[i] = (hi - lo) / (2.0 * step)
        grads[name] = g
    return GradientMap(grads)


def max_relative_error(g1, g2, floor=1e-4):
    """Worst-case relative discrepancy between two gradient maps.

    Denominators are clamped below by ``floor`` so that roundoff noise on
    near-zero gradients is compared absolutely. Returns (error, name).
    """
    worst = 0.0
    worst_name = ""
    for name in g1:
        a, b = np.asarray(g1[name]), np.asarray(g2[name])
        denom = np.maximum(np.maximum(np.abs(a), np.abs(b)), floor)
        err = np.abs(a - b) / denom
        if err.size and err.max() >= worst:
            worst = float(err.max())
            worst_name = name
    return worst, worst_name
