# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels: direct-loop convolution and max pooling over NHWC
tensors. Contracts identical to the pure-NumPy backend."""

import numpy as np
cimport numpy as cnp
cimport cython

BACKEND_NAME = "cython"

ctypedef fused real:
    float
    double


@cython.boundscheck(False)
@cython.wraparound(False)
def conv2d_forward(real[:, :, :, ::1] x, real[:, :, :, ::1] w,
                   real[::1] b, int stride):
    cdef Py_ssize_t n = x.shape[0], h = x.shape[1], wd = x.shape[2], cin = x.shape[3]
    cdef Py_ssize_t kh = w.shape[0], kw = w.shape[1], cout = w.shape[3]
    cdef Py_ssize_t ho = (h - kh) // stride + 1
    cdef Py_ssize_t wo = (wd - kw) // stride + 1
    if real is float:
        out_arr = np.empty((n, ho, wo, cout), dtype=np.float32)
    else:
        out_arr = np.empty((n, ho, wo, cout), dtype=np.float64)
    cdef real[:, :, :, ::1] out = out_arr
    cdef Py_ssize_t s, oy, ox, oc, i, j, c, iy, ix
    cdef real acc
    with nogil:
        for s in range(n):
            for oy in range(ho):
                for ox in range(wo):
                    for oc in range(cout):
                        acc = b[oc]
                        for i in range(kh):
                            iy = oy * stride + i
                            for j in range(kw):
                                ix = ox * stride + j
                                for c in range(cin):
                                    acc = acc + x[s, iy, ix, c] * w[i, j, c, oc]
                        out[s, oy, ox, oc] = acc
    return out_arr


@cython.boundscheck(False)
@cython.wraparound(False)
def conv2d_backward_weights(real[:, :, :, ::1] x, real[:, :, :, ::1] dy,
                            int kh, int kw, int stride):
    cdef Py_ssize_t n = x.shape[0], cin = x.shape[3]
    cdef Py_ssize_t ho = dy.shape[1], wo = dy.shape[2], cout = dy.shape[3]
    if real is float:
        dw_arr = np.zeros((kh, kw, cin, cout), dtype=np.float32)
        db_arr = np.zeros(cout, dtype=np.float32)
    else:
        dw_arr = np.zeros((kh, kw, cin, cout), dtype=np.float64)
        db_arr = np.zeros(cout, dtype=np.float64)
    cdef real[:, :, :, ::1] dw = dw_arr
    cdef real[::1] db = db_arr
    cdef Py_ssize_t s, oy, ox, oc, i, j, c, iy, ix
    cdef real g
    with nogil:
        for s in range(n):
            for oy in range(ho):
                for ox in range(wo):
                    for oc in range(cout):
                        g = dy[s, oy, ox, oc]
                        db[oc] = db[oc] + g
                        for i in range(kh):
                            iy = oy * stride + i
                            for j in range(kw):
                                ix = ox * stride + j
                                for c in range(cin):
                                    dw[i, j, c, oc] = dw[i, j, c, oc] + x[s, iy, ix, c] * g
    return dw_arr, db_arr


@cython.boundscheck(False)
@cython.wraparound(False)
def conv2d_backward_input(real[:, :, :, ::1] dy, real[:, :, :, ::1] w,
                          int stride, int in_h, int in_w):
    cdef Py_ssize_t n = dy.shape[0], ho = dy.shape[1], wo = dy.shape[2], cout = dy.shape[3]
    cdef Py_ssize_t kh = w.shape[0], kw = w.shape[1], cin = w.shape[2]
    if real is float:
        dx_arr = np.zeros((n, in_h, in_w, cin), dtype=np.float32)
    else:
        dx_arr = np.zeros((n, in_h, in_w, cin), dtype=np.float64)
    cdef real[:, :, :, ::1] dx = dx_arr
    cdef Py_ssize_t s, oy, ox, oc, i, j, c, iy, ix
    cdef real g
    with nogil:
        for s in range(n):
            for oy in range(ho):
                for ox in range(wo):
                    for oc in range(cout):
                        g = dy[s, oy, ox, oc]
                        for i in range(kh):
                            iy = oy * stride + i
                            for j in range(kw):
                                ix = ox * stride + j
                                for c in range(cin):
                                    dx[s, iy, ix, c] = dx[s, iy, ix, c] + w[i, j, c, oc] * g
    return dx_arr


@cython.boundscheck(False)
@cython.wraparound(False)
def maxpool_forward(real[:, :, :, ::1] x, int pool, int stride):
    cdef Py_ssize_t n = x.shape[0], h = x.shape[1], wd = x.shape[2], c = x.shape[3]
    cdef Py_ssize_t ho = (h - pool) // stride + 1
    cdef Py_ssize_t wo = (wd - pool) // stride + 1
    if real is float:
        y_arr = np.empty((n, ho, wo, c), dtype=np.float32)
    else:
        y_arr = np.empty((n, ho, wo, c), dtype=np.float64)
    arg_arr = np.empty((n, ho, wo, c), dtype=np.int32)
    cdef real[:, :, :, ::1] y = y_arr
    cdef cnp.int32_t[:, :, :, ::1] arg = arg_arr
    cdef Py_ssize_t s, oy, ox, ch, i, j
    cdef real best, v
    cdef int besti
    with nogil:
        for s in range(n):
            for oy in range(ho):
                for ox in range(wo):
                    for ch in range(c):
                        best = x[s, oy * stride, ox * stride, ch]
                        besti = 0
                        for i in range(pool):
                            for j in range(pool):
                                v = x[s, oy * stride + i, ox * stride + j, ch]
                                if v > best:
                                    best = v
                                    besti = i * pool + j
                        y[s, oy, ox, ch] = best
                        arg[s, oy, ox, ch] = besti
    return y_arr, arg_arr


@cython.boundscheck(False)
@cython.wraparound(False)
def maxpool_backward(real[:, :, :, ::1] dy, cnp.int32_t[:, :, :, ::1] argmax,
                     int pool, int stride, int in_h, int in_w):
    cdef Py_ssize_t n = dy.shape[0], ho = dy.shape[1], wo = dy.shape[2], c = dy.shape[3]
    if real is float:
        dx_arr = np.zeros((n, in_h, in_w, c), dtype=np.float32)
    else:
        dx_arr = np.zeros((n, in_h, in_w, c), dtype=np.float64)
    cdef real[:, :, :, ::1] dx = dx_arr
    cdef Py_ssize_t s, oy, ox, ch
    cdef int a, py, px
    with nogil:
        for s in range(n):
            for oy in range(ho):
                for ox in range(wo):
                    for ch in range(c):
                        a = argmax[s, oy, ox, ch]
                        py = a // pool
                        px = a % pool
                        dx[s, oy * stride + py, ox * stride + px, ch] = (
                            dx[s, oy * stride + py, ox * stride + px, ch]
                            + dy[s, oy, ox, ch])
    return dx_arr
