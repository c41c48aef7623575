"""Binary particle-swarm feature selection with a 1-NN wrapper fitness."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict

import numpy as np


class SelectError(ValueError):
    pass


@dataclass
class SwarmConfig:
    particles: int = 20
    iterations: int = 50
    inertia: float = 0.7
    cognitive: float = 1.5
    social: float = 1.5
    v_max: float = 4.0
    seed: int = 0
    folds: int = 5

    def __post_init__(self):
        if self.particles < 2:
            raise SelectError("need at least 2 particles")
        if self.iterations < 1:
            raise SelectError("need at least 1 iteration")
        if not (0.0 <= self.inertia <= 1.0):
            raise SelectError("inertia must be in [0, 1]")
        if self.cognitive <= 0 or self.social <= 0:
            raise SelectError("cognitive and social weights must be positive")


@dataclass
class FeatureMask:
    bits: np.ndarray
    fitness: float
    seed: int

    def __post_init__(self):
        self.bits = np.asarray(self.bits, dtype=bool)
        if not self.bits.any():
            raise SelectError("mask must select at least one feature")
        if not np.isfinite(self.fitness):
            raise SelectError("fitness must be finite")


@dataclass
class SelectionReport:
    mask: FeatureMask
    trace: list[float]
    config: SwarmConfig
    selection_frequency: list[float]

    def to_json(self) -> str:
        return json.dumps({
            "mask_bits": [bool(b) for b in self.mask.bits],
            "fitness": self.mask.fitness,
            "seed": self.mask.seed,
            "trace": self.trace,
            "config": asdict(self.config),
            "selection_frequency": self.selection_frequency,
        }, indent=2, sort_keys=True)


def _stratified_folds(labels: np.ndarray, folds: int, rng: np.random.Generator):
    """Deterministic stratified fold assignment: per class, seeded shuffle
    then round-robin."""
    assignment = np.empty(labels.size, dtype=np.int64)
    for cls in np.unique(labels):
        idx = np.flatnonzero(labels == cls)
        if idx.size < folds:
            raise SelectError(
                f"class {cls!r} has {idx.size} samples, fewer than {folds} folds"
            )
        idx = rng.permutation(idx)
        assignment[idx] = np.arange(idx.size) % folds
    return assignment


def _knn1_accuracy(train_x, train_y, test_x, test_y) -> float:
    # z-score normalization fit on the training fold
    mu = train_x.mean(axis=0)
    sd = train_x.std(axis=0)
    sd = np.where(sd > 0, sd, 1.0)
    tr = (train_x - mu) / sd
    te = (test_x - mu) / sd
    d2 = ((te[:, None, :] - tr[None, :, :]) ** 2).sum(axis=2)
    nearest = np.argmin(d2, axis=1)
    return float(np.mean(train_y[nearest] == test_y))


def wrapper_fitness(bits, features, labels, folds: int = 5, seed: int = 0) -> float:
    """Mean stratified k-fold accuracy of a 1-nearest-neighbor classifier
    restricted to the masked feature columns."""
    bits = np.asarray(bits, dtype=bool)
    if not bits.any():
        raise SelectError("empty mask")
    x = np.asarray(features, dtype=np.float64)[:, bits]
    y = np.asarray(labels)
    rng = np.random.default_rng(seed)
    fold_of = _stratified_folds(y, folds, rng)
    accs = []
    for f in range(folds):
        test = fold_of == f
        accs.append(_knn1_accuracy(x[~test], y[~test], x[test], y[test]))
    return float(np.mean(accs))


def _sigmoid(v):
    return 1.0 / (1.0 + np.exp(-v))


def pso_select(features, labels, config: SwarmConfig | None = None,
               fitness_fn=None) -> SelectionReport:
    """Binary PSO over feature masks.

    Continuous velocities, sigmoid-squashed bit probabilities, stochastic bit
    sampling; particles that sample an empty mask get their highest-probability
    bit set. Per-particle RNG streams derive from the master seed so results
    do not depend on evaluation scheduling.
    """
    config = config or SwarmConfig()
    x = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels)
    if np.unique(y).size < 2:
        raise SelectError("need at least two classes")
    n, d = x.shape

    if fitness_fn is None:
        def fitness_fn(bits):
            return wrapper_fitness(bits, x, y, config.folds, config.seed)

    master = np.random.SeedSequence(config.seed)
    init_rng = np.random.default_rng(master.spawn(1)[0])
    particle_rngs = [np.random.default_rng(s)
                     for s in master.spawn(config.particles + 1)[1:]]

    vel = init_rng.uniform(-1.0, 1.0, size=(config.particles, d))
    pos = (init_rng.random((config.particles, d)) < 0.5)
    for i in range(config.particles):
        if not pos[i].any():
            pos[i, init_rng.integers(d)] = True

    fitness_cache: dict[bytes, float] = {}

    def eval_mask(bits):
        key = np.packbits(bits).tobytes()
        if key not in fitness_cache:
            fitness_cache[key] = fitness_fn(bits)
        return fitness_cache[key]

    pbest = pos.copy()
    pbest_fit = np.array([eval_mask(pos[i]) for i in range(config.particles)])
    g = int(np.argmax(pbest_fit))
    gbest = pbest[g].copy()
    gbest_fit = float(pbest_fit[g])
    selection_counts = pos.sum(axis=0).astype(np.float64)
    n_sampled = float(config.particles)
    trace = [gbest_fit]

    for _ in range(config.iterations - 1):
        for i in range(config.particles):
            rng = particle_rngs[i]
            r1 = rng.random(d)
            r2 = rng.random(d)
            vel[i] = (config.inertia * vel[i]
                      + config.cognitive * r1 * (pbest[i].astype(float) - pos[i].astype(float))
                      + config.social * r2 * (gbest.astype(float) - pos[i].astype(float)))
            np.clip(vel[i], -config.v_max, config.v_max, out=vel[i])
            prob = _sigmoid(vel[i])
            pos[i] = rng.random(d) < prob
            if not pos[i].any():
                pos[i, int(np.argmax(prob))] = True
            fit = eval_mask(pos[i])
            if fit > pbest_fit[i]:
                pbest[i] = pos[i].copy()
                pbest_fit[i] = fit
        selection_counts += pos.sum(axis=0)
        n_sampled += config.particles
        g = int(np.argmax(pbest_fit))
        if pbest_fit[g] > gbest_fit:
            gbest_fit = float(pbest_fit[g])
            gbest = pbest[g].copy()
        trace.append(gbest_fit)

    # re-evaluate the returned mask so the reported fitness is never stale
    final_fit = fitness_fn(gbest)
    mask = FeatureMask(gbest, final_fit, config.seed)
    return SelectionReport(mask, trace, config,
                           list(selection_counts / n_sampled))


def exhaustive_best_mask(features, labels, folds: int = 5, seed: int = 0):
    """Brute-force search over all non-empty masks (oracle for small d)."""
    x = np.asarray(features, dtype=np.float64)
    d = x.shape[1]
    best_bits, best_fit = None, -np.inf
    for code in range(1, 1 << d):
        bits = np.array([(code >> k) & 1 for k in range(d)], dtype=bool)
        fit = wrapper_fitness(bits, x, labels, folds, seed)
        if fit > best_fit:
            best_bits, best_fit = bits, fit
    return best_bits, best_fit
