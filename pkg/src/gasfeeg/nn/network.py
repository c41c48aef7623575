"""Network assembly: the custom three-conv CNN and the dense feature ANN."""

from __future__ import annotations

import math

import numpy as np

from . import layers as L
from .layers import NnError, get_dtype


class Network:
    def __init__(self, layer_list, input_shape, rng_seed=0):
        self.layers = list(layer_list)
        self.input_shape = tuple(input_shape)
        self.rng_seed = rng_seed
        rng = np.random.default_rng(rng_seed)
        shape = self.input_shape
        self.shape_chain = [shape]
        for layer in self.layers:
            layer.build(shape, rng)
            shape = layer.out_shape(shape)
            self.shape_chain.append(shape)
        self.output_shape = shape

    def forward(self, batch, training=False):
        x = np.asarray(batch, dtype=get_dtype())
        if x.shape[1:] != self.input_shape:
            raise NnError(
                f"shape mismatch: expected {self.input_shape}, got {x.shape[1:]}"
            )
        for layer in self.layers:
            x = layer.forward(x, training)
        return x

    def backward(self, dloss):
        g = dloss
        for layer in reversed(self.layers):
            g = layer.backward(g)
        return g

    def params(self):
        return [p for layer in self.layers for p in layer.params()]

    def grads(self):
        return [g for layer in self.layers for g in layer.grads()]

    def specs(self):
        return [layer.spec() for layer in self.layers]

    def buffers(self):
        return [b for layer in self.layers for b in layer.buffers()]

    def get_weights(self):
        """Trainable parameters plus persistent buffers, in layer order."""
        return [p.copy() for p in self.params() + self.buffers()]

    def set_weights(self, weights):
        params = self.params() + self.buffers()
        if len(weights) != len(params):
            raise NnError("weight count mismatch")
        for p, w in zip(params, weights):
            if p.shape != w.shape:
                raise NnError(
                    f"shape mismatch: expected {p.shape}, got {w.shape}"
                )
            p[...] = w

    def num_params(self):
        return sum(p.size for p in self.params())


def _scaled(width: int, scale: float) -> int:
    return max(1, math.ceil(width * scale))


def build_custom_cnn(input_shape=(224, 224, 3), scale: float = 1.0,
                     seed: int = 0) -> Network:
    """Three-conv CNN: Conv 3x3 stride 1, two Conv 3x3 stride 2, BatchNorm,
    MaxPool 2x2, then sigmoid dense layers 1024/512 and a 2-way softmax.
    `scale` multiplies filter counts and dense widths (rounded up, min 1)."""
    h, w, c = input_shape
    if h < 16 or w < 16:
        raise NnError("input spatial dimensions must be >= 16")
    if not (0.0 < scale <= 1.0):
        raise NnError("scale must be in (0, 1]")
    layer_list = [
        L.Conv2D(3, 3, _scaled(32, scale), stride=1), L.ReLU(),
        L.Conv2D(3, 3, _scaled(64, scale), stride=2), L.ReLU(),
        L.Conv2D(3, 3, _scaled(64, scale), stride=2), L.ReLU(),
        L.BatchNorm(),
        L.MaxPool(2, 2),
        L.Flatten(),
        L.Dense(_scaled(1024, scale)), L.Sigmoid(),
        L.Dense(_scaled(512, scale)), L.Sigmoid(),
        L.Dense(2), L.Softmax(),
    ]
    return Network(layer_list, input_shape, seed)


def build_dense_ann(input_dim: int, hidden=(32, 16), seed: int = 0) -> Network:
    """Feature classifier: sigmoid dense stack ending in a 2-way softmax."""
    if input_dim < 1:
        raise NnError("input_dim must be >= 1")
    hidden = list(hidden)
    if not hidden:
        raise NnError("need at least one hidden layer")
    layer_list = []
    for width in hidden:
        layer_list += [L.Dense(width), L.Sigmoid()]
    layer_list += [L.Dense(2), L.Softmax()]
    return Network(layer_list, (input_dim,), seed)


def network_from_specs(specs, input_shape, seed=0) -> Network:
    return Network([L.layer_from_spec(s) for s in specs], input_shape, seed)
