"""Layer implementations with forward/backward passes over NHWC tensors.

All layers cache what their backward pass needs during forward; backward must
be called after a training-mode forward with the matching input.
"""

from __future__ import annotations

import numpy as np

from .. import kernels

_DTYPE = np.float64


class NnError(ValueError):
    pass


def set_dtype(name: str):
    """Global tensor precision: "float32" or "float64"."""
    global _DTYPE
    if name not in ("float32", "float64"):
        raise NnError(f"unknown dtype {name!r}")
    _DTYPE = np.float32 if name == "float32" else np.float64


def get_dtype():
    return _DTYPE


class Layer:
    kind = "Layer"

    def params(self):
        return []

    def grads(self):
        return []

    def buffers(self):
        """Non-trainable state that checkpoints must carry (e.g. running
        batch-norm statistics)."""
        return []

    def out_shape(self, in_shape):
        raise NotImplementedError

    def build(self, in_shape, rng):
        pass

    def forward(self, x, training):
        raise NotImplementedError

    def backward(self, dy):
        raise NotImplementedError

    def spec(self) -> dict:
        return {"kind": self.kind}


class Conv2D(Layer):
    kind = "Conv2D"

    def __init__(self, kernel_h, kernel_w, filters, stride=1):
        if stride < 1 or kernel_h < 1 or kernel_w < 1 or filters < 1:
            raise NnError("invalid convolution parameters")
        self.kh, self.kw = kernel_h, kernel_w
        self.filters = filters
        self.stride = stride
        self.w = None
        self.b = None

    def out_shape(self, in_shape):
        h, w, _ = in_shape
        if self.kh > h or self.kw > w:
            raise NnError(f"kernel {self.kh}x{self.kw} exceeds input {h}x{w}")
        ho = (h - self.kh) // self.stride + 1
        wo = (w - self.kw) // self.stride + 1
        return (ho, wo, self.filters)

    def build(self, in_shape, rng):
        cin = in_shape[2]
        fan_in = self.kh * self.kw * cin
        limit = np.sqrt(6.0 / fan_in)  # He-uniform, ReLU follows
        self.w = rng.uniform(-limit, limit,
                             (self.kh, self.kw, cin, self.filters)).astype(_DTYPE)
        self.b = np.zeros(self.filters, dtype=_DTYPE)
        self.dw = np.zeros_like(self.w)
        self.db = np.zeros_like(self.b)

    def params(self):
        return [self.w, self.b]

    def grads(self):
        return [self.dw, self.db]

    def forward(self, x, training):
        self._x = np.ascontiguousarray(x, dtype=_DTYPE)
        return kernels.conv2d_forward(self._x, np.ascontiguousarray(self.w),
                                      np.ascontiguousarray(self.b), self.stride)

    def backward(self, dy):
        dy = np.ascontiguousarray(dy, dtype=_DTYPE)
        dw, db = kernels.conv2d_backward_weights(self._x, dy, self.kh, self.kw,
                                                 self.stride)
        self.dw[...] = dw
        self.db[...] = db
        return kernels.conv2d_backward_input(dy, np.ascontiguousarray(self.w),
                                             self.stride, self._x.shape[1],
                                             self._x.shape[2])

    def spec(self):
        return {"kind": self.kind, "kernel_h": self.kh, "kernel_w": self.kw,
                "filters": self.filters, "stride": self.stride}


class ReLU(Layer):
    kind = "ReLU"

    def out_shape(self, in_shape):
        return in_shape

    def forward(self, x, training):
        self._mask = x > 0
        return np.where(self._mask, x, 0)

    def backward(self, dy):
        return np.where(self._mask, dy, 0)


class BatchNorm(Layer):
    """Per-channel normalization: batch statistics in training mode, running
    averages (momentum 0.9) at inference."""

    kind = "BatchNorm"
    momentum = 0.9
    eps = 1e-5

    def __init__(self):
        self.gamma = None

    def out_shape(self, in_shape):
        return in_shape

    def build(self, in_shape, rng):
        c = in_shape[-1]
        self.gamma = np.ones(c, dtype=_DTYPE)
        self.beta = np.zeros(c, dtype=_DTYPE)
        self.running_mean = np.zeros(c, dtype=_DTYPE)
        self.running_var = np.ones(c, dtype=_DTYPE)
        self.dgamma = np.zeros_like(self.gamma)
        self.dbeta = np.zeros_like(self.beta)

    def params(self):
        return [self.gamma, self.beta]

    def grads(self):
        return [self.dgamma, self.dbeta]

    def buffers(self):
        return [self.running_mean, self.running_var]

    def forward(self, x, training):
        axes = tuple(range(x.ndim - 1))
        if training:
            mean = x.mean(axis=axes)
            var = x.var(axis=axes)
            self.running_mean[...] = (self.momentum * self.running_mean
                                      + (1 - self.momentum) * mean)
            self.running_var[...] = (self.momentum * self.running_var
                                     + (1 - self.momentum) * var)
        else:
            mean = self.running_mean
            var = self.running_var
        self._inv_std = 1.0 / np.sqrt(var + self.eps)
        self._xhat = (x - mean) * self._inv_std
        self._axes = axes
        self._m = x.size // x.shape[-1]
        return self.gamma * self._xhat + self.beta

    def backward(self, dy):
        axes = self._axes
        self.dgamma[...] = (dy * self._xhat).sum(axis=axes)
        self.dbeta[...] = dy.sum(axis=axes)
        m = self._m
        dxhat = dy * self.gamma
        return (self._inv_std / m) * (
            m * dxhat
            - dxhat.sum(axis=axes)
            - self._xhat * (dxhat * self._xhat).sum(axis=axes)
        )


class MaxPool(Layer):
    kind = "MaxPool"

    def __init__(self, pool=2, stride=2):
        if pool < 1 or stride < 1:
            raise NnError("invalid pooling parameters")
        self.pool = pool
        self.stride = stride

    def out_shape(self, in_shape):
        h, w, c = in_shape
        if self.pool > h or self.pool > w:
            raise NnError("pool window exceeds input")
        return ((h - self.pool) // self.stride + 1,
                (w - self.pool) // self.stride + 1, c)

    def forward(self, x, training):
        x = np.ascontiguousarray(x, dtype=_DTYPE)
        self._in_shape = x.shape
        y, self._argmax = kernels.maxpool_forward(x, self.pool, self.stride)
        return y

    def backward(self, dy):
        dy = np.ascontiguousarray(dy, dtype=_DTYPE)
        return kernels.maxpool_backward(dy, self._argmax, self.pool,
                                        self.stride, self._in_shape[1],
                                        self._in_shape[2])

    def spec(self):
        return {"kind": self.kind, "pool": self.pool, "stride": self.stride}


class Flatten(Layer):
    kind = "Flatten"

    def out_shape(self, in_shape):
        return (int(np.prod(in_shape)),)

    def forward(self, x, training):
        self._in_shape = x.shape
        return x.reshape(x.shape[0], -1)

    def backward(self, dy):
        return dy.reshape(self._in_shape)


class Dense(Layer):
    kind = "Dense"

    def __init__(self, units):
        if units < 1:
            raise NnError("units must be >= 1")
        self.units = units
        self.w = None

    def out_shape(self, in_shape):
        if len(in_shape) != 1:
            raise NnError("Dense expects a flat input; add Flatten first")
        return (self.units,)

    def build(self, in_shape, rng):
        fan_in = in_shape[0]
        limit = np.sqrt(6.0 / (fan_in + self.units))  # Xavier-uniform
        self.w = rng.uniform(-limit, limit, (fan_in, self.units)).astype(_DTYPE)
        self.b = np.zeros(self.units, dtype=_DTYPE)
        self.dw = np.zeros_like(self.w)
        self.db = np.zeros_like(self.b)

    def params(self):
        return [self.w, self.b]

    def grads(self):
        return [self.dw, self.db]

    def forward(self, x, training):
        self._x = x
        return x @ self.w + self.b

    def backward(self, dy):
        self.dw[...] = self._x.T @ dy
        self.db[...] = dy.sum(axis=0)
        return dy @ self.w.T

    def spec(self):
        return {"kind": self.kind, "units": self.units}


class Sigmoid(Layer):
    kind = "Sigmoid"

    def out_shape(self, in_shape):
        return in_shape

    def forward(self, x, training):
        self._y = np.where(x >= 0, 1.0 / (1.0 + np.exp(-np.abs(x))),
                           np.exp(-np.abs(x)) / (1.0 + np.exp(-np.abs(x))))
        return self._y

    def backward(self, dy):
        return dy * self._y * (1.0 - self._y)


class Softmax(Layer):
    kind = "Softmax"

    def out_shape(self, in_shape):
        return in_shape

    def forward(self, x, training):
        z = x - x.max(axis=-1, keepdims=True)
        e = np.exp(z)
        self._y = e / e.sum(axis=-1, keepdims=True)
        return self._y

    def backward(self, dy):
        y = self._y
        return y * (dy - (dy * y).sum(axis=-1, keepdims=True))


LAYER_KINDS = {cls.kind: cls for cls in
               (Conv2D, ReLU, BatchNorm, MaxPool, Flatten, Dense, Sigmoid, Softmax)}


def layer_from_spec(spec: dict) -> Layer:
    kind = spec["kind"]
    if kind not in LAYER_KINDS:
        raise NnError(f"unknown layer kind {kind!r}")
    if kind == "Conv2D":
        return Conv2D(spec["kernel_h"], spec["kernel_w"], spec["filters"],
                      spec["stride"])
    if kind == "MaxPool":
        return MaxPool(spec["pool"], spec["stride"])
    if kind == "Dense":
        return Dense(spec["units"])
    return LAYER_KINDS[kind]()
