"""Built-in two-class synthetic dataset so every pipeline runs without the
benchmark recordings.

Class layout on disk mirrors the expected data root: one subdirectory per
class (normal/, focal/), delimited text records with two columns (the second
column is an independently re-noised copy, exercising channel selection).

  - normal: 5 Hz sinusoid, amplitude 50, additive Gaussian noise sigma 5
  - focal:  periodic spike train (period 64 samples, amplitude 120, width 3)
            over a low base oscillation, same noise level
"""

from __future__ import annotations

import os

import numpy as np

SAMPLING_RATE_HZ = 512.0
SINE_HZ = 5.0
SINE_AMP = 50.0
SPIKE_PERIOD = 64
SPIKE_AMP = 120.0
SPIKE_WIDTH = 3
NOISE_SIGMA = 5.0


def normal_record(n_samples: int, rng: np.random.Generator) -> np.ndarray:
    t = np.arange(n_samples) / SAMPLING_RATE_HZ
    phase = rng.uniform(0, 2 * np.pi)
    return (SINE_AMP * np.sin(2 * np.pi * SINE_HZ * t + phase)
            + rng.normal(0, NOISE_SIGMA, n_samples))


def focal_record(n_samples: int, rng: np.random.Generator) -> np.ndarray:
    x = rng.normal(0, NOISE_SIGMA, n_samples)
    t = np.arange(n_samples) / SAMPLING_RATE_HZ
    x += 0.2 * SINE_AMP * np.sin(2 * np.pi * SINE_HZ * t + rng.uniform(0, 2 * np.pi))
    offset = int(rng.integers(SPIKE_PERIOD))
    for center in range(offset, n_samples, SPIKE_PERIOD):
        lo = max(0, center - SPIKE_WIDTH)
        hi = min(n_samples, center + SPIKE_WIDTH + 1)
        k = np.arange(lo, hi) - center
        x[lo:hi] += SPIKE_AMP * np.exp(-0.5 * (k / (SPIKE_WIDTH / 2.0)) ** 2)
    return x


def generate_dataset(out_dir, records_per_class: int = 10,
                     epochs_per_record: int = 25, epoch_len: int = 256,
                     seed: int = 0) -> dict[str, list[str]]:
    """Write delimited records under out_dir/{normal,focal}; returns the
    file paths per class."""
    rng = np.random.default_rng(seed)
    n_samples = epochs_per_record * epoch_len
    paths: dict[str, list[str]] = {"normal": [], "focal": []}
    for cls, gen in (("normal", normal_record), ("focal", focal_record)):
        cls_dir = os.path.join(out_dir, cls)
        os.makedirs(cls_dir, exist_ok=True)
        for i in range(records_per_class):
            x = gen(n_samples, rng)
            second = x + rng.normal(0, NOISE_SIGMA, n_samples)
            path = os.path.join(cls_dir, f"{cls}_{i:03d}.csv")
            with open(path, "w") as f:
                for a, b in zip(x, second):
                    f.write(f"{a:.6f},{b:.6f}\n")
            paths[cls].append(path)
    return paths
