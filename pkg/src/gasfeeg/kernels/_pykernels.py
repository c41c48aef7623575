"""Pure-NumPy implementations of the hot kernels (im2col convolution and
window-view max pooling). Same contracts as the compiled backend."""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"


def _windows(x, kh, kw, stride):
    # (n, ho, wo, kh, kw, c)
    v = np.lib.stride_tricks.sliding_window_view(x, (kh, kw), axis=(1, 2))
    v = v[:, ::stride, ::stride]  # (n, ho, wo, c, kh, kw)
    return np.moveaxis(v, 3, 5)


def conv2d_forward(x, w, b, stride):
    """x: (n,h,w,cin), w: (kh,kw,cin,cout), b: (cout,) -> (n,ho,wo,cout)."""
    kh, kw = w.shape[0], w.shape[1]
    win = _windows(x, kh, kw, stride)
    out = np.tensordot(win, w, axes=([3, 4, 5], [0, 1, 2]))
    return out + b


def conv2d_backward_weights(x, dy, kh, kw, stride):
    """Gradients (dw, db) of the convolution weights and bias."""
    win = _windows(x, kh, kw, stride)
    dw = np.tensordot(win, dy, axes=([0, 1, 2], [0, 1, 2]))
    db = dy.sum(axis=(0, 1, 2))
    return dw, db


def conv2d_backward_input(dy, w, stride, in_h, in_w):
    """Gradient with respect to the convolution input, shape (n,in_h,in_w,cin)."""
    n, ho, wo, cout = dy.shape
    kh, kw, cin, _ = w.shape
    dx = np.zeros((n, in_h, in_w, cin), dtype=dy.dtype)
    for i in range(kh):
        for j in range(kw):
            # contribution of kernel tap (i, j) to every output position
            contrib = np.tensordot(dy, w[i, j], axes=([3], [1]))
            dx[:, i:i + stride * ho:stride, j:j + stride * wo:stride, :] += contrib
    return dx


def maxpool_forward(x, pool, stride):
    """Returns (y, argmax) where argmax holds the flat in-window index of the
    selected element (first occurrence on ties)."""
    v = np.lib.stride_tricks.sliding_window_view(x, (pool, pool), axis=(1, 2))
    v = v[:, ::stride, ::stride]  # (n, ho, wo, c, pool, pool)
    flat = v.reshape(v.shape[:4] + (pool * pool,))
    arg = np.argmax(flat, axis=4)
    y = np.take_along_axis(flat, arg[..., None], axis=4)[..., 0]
    return y, arg.astype(np.int32)


def maxpool_backward(dy, argmax, pool, stride, in_h, in_w):
    n, ho, wo, c = dy.shape
    dx = np.zeros((n, in_h, in_w, c), dtype=dy.dtype)
    py, px = np.divmod(argmax, pool)
    ys = np.arange(ho)[None, :, None, None] * stride + py
    xs = np.arange(wo)[None, None, :, None] * stride + px
    ns = np.arange(n)[:, None, None, None]
    cs = np.arange(c)[None, None, None, :]
    np.add.at(dx, (ns, ys, xs, cs), dy)
    return dx
