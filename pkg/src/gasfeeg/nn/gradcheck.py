"""Finite-difference verification of backpropagation."""

from __future__ import annotations

import numpy as np

from .layers import NnError, get_dtype
from .network import Network
from .train import cross_entropy, cross_entropy_grad, one_hot


def gradient_check(net: Network, batch, labels, epsilon: float = 1e-5) -> float:
    """Max relative error between analytic and central-difference gradients
    over every parameter. Run in float64 mode; epsilon in [1e-7, 1e-3]."""
    if not (1e-7 <= epsilon <= 1e-3):
        raise NnError("epsilon must be in [1e-7, 1e-3]")
    if get_dtype() != np.float64:
        raise NnError("gradient check requires float64 mode")
    x = np.asarray(batch, dtype=np.float64)
    y = one_hot(labels)

    def loss_at():
        probs = net.forward(x, training=True)
        loss = cross_entropy(probs, y)
        if not np.isfinite(loss):
            raise NnError("non-finite loss during gradient check")
        return loss, probs

    loss, probs = loss_at()
    net.backward(cross_entropy_grad(probs, y))
    analytic = [g.copy() for g in net.grads()]

    max_rel = 0.0
    for p, g in zip(net.params(), analytic):
        flat = p.reshape(-1)
        gflat = g.reshape(-1)
        for k in range(flat.size):
            orig = flat[k]
            flat[k] = orig + epsilon
            lp, _ = loss_at()
            flat[k] = orig - epsilon
            lm, _ = loss_at()
            flat[k] = orig
            numeric = (lp - lm) / (2 * epsilon)
            denom = max(abs(gflat[k]), abs(numeric), 1e-8)
            max_rel = max(max_rel, abs(gflat[k] - numeric) / denom)
    return max_rel
