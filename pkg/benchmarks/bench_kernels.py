"""Benchmark the compiled kernel backend against the pure-NumPy fallback.

Usage: python benchmarks/bench_kernels.py [--repeats N]

Times the five hot operations (convolution forward/backward and max-pooling
forward/backward) on CNN-shaped tensors and prints a per-op comparison table.
"""

import argparse
import time

import numpy as np

from gasfeeg import kernels

CASES = [
    # name, (n, h, w, cin), (kh, kw, cout), stride
    ("conv 64x64x3 -> 32f s1", (4, 64, 64, 3), (3, 3, 32), 1),
    ("conv 62x62x32 -> 64f s2", (4, 62, 62, 32), (3, 3, 64), 2),
    ("conv 30x30x64 -> 64f s2", (4, 30, 30, 64), (3, 3, 64), 2),
]


def time_op(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_backend(backend, repeats, rng):
    kernels.select_backend(backend)
    rows = {}
    for name, xshape, (kh, kw, cout), stride in CASES:
        n, h, w, cin = xshape
        x = rng.standard_normal(xshape).astype(np.float32)
        wgt = rng.standard_normal((kh, kw, cin, cout)).astype(np.float32)
        b = np.zeros(cout, dtype=np.float32)
        y = kernels.conv2d_forward(x, wgt, b, stride)
        dy = rng.standard_normal(y.shape).astype(np.float32)
        rows[f"{name} fwd"] = time_op(
            lambda: kernels.conv2d_forward(x, wgt, b, stride), repeats)
        rows[f"{name} bwd-w"] = time_op(
            lambda: kernels.conv2d_backward_weights(x, dy, kh, kw, stride),
            repeats)
        rows[f"{name} bwd-x"] = time_op(
            lambda: kernels.conv2d_backward_input(dy, wgt, stride, h, w),
            repeats)

    x = rng.standard_normal((4, 54, 54, 64)).astype(np.float32)
    yp, argmax = kernels.maxpool_forward(x, 2, 2)
    dy = rng.standard_normal(yp.shape).astype(np.float32)
    rows["maxpool 54x54x64 fwd"] = time_op(
        lambda: kernels.maxpool_forward(x, 2, 2), repeats)
    rows["maxpool 54x54x64 bwd"] = time_op(
        lambda: kernels.maxpool_backward(dy, argmax, 2, 2, 54, 54), repeats)
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5,
                        help="timing repeats per op (best is reported)")
    args = parser.parse_args()

    backends = kernels.available_backends()
    print(f"available backends: {backends}")
    rng = np.random.default_rng(0)
    results = {b: bench_backend(b, args.repeats, rng) for b in backends}
    kernels.select_backend("auto")

    ops = list(next(iter(results.values())))
    header = f"{'operation':<28}" + "".join(f"{b:>12}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for op in ops:
        line = f"{op:<28}"
        for b in backends:
            line += f"{results[b][op] * 1e3:>10.2f}ms"
        if len(backends) == 2:
            a, b = backends
            line += f"{results[b][op] / results[a][op]:>9.2f}x"
        print(line)


if __name__ == "__main__":
    main()
