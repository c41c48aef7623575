import numpy as np
import pytest

from gasfeeg.pso import (FeatureMask, SelectError, SwarmConfig,
                         exhaustive_best_mask, pso_select, wrapper_fitness)


def planted_dataset(rng, n=60, d=10, informative=3):
    """One feature equals the 0/1 label (plus tiny jitter), the rest noise."""
    y = np.array([0, 1] * (n // 2))
    x = rng.standard_normal((n, d))
    x[:, informative] = y + 0.01 * rng.standard_normal(n)
    return x, y


class TestWrapperFitness:
    def test_separable_single_feature(self, rng):
        x, y = planted_dataset(rng)
        bits = np.zeros(10, dtype=bool)
        bits[3] = True
        assert wrapper_fitness(bits, x, y, folds=5, seed=0) >= 0.95

    def test_permutation_null(self, rng):
        x = rng.standard_normal((200, 10))
        bits = np.ones(10, dtype=bool)
        for seed in range(20):
            y = np.random.default_rng(seed).integers(0, 2, 200)
            fit = wrapper_fitness(bits, x, y, folds=5, seed=seed)
            assert 0.35 <= fit <= 0.65

    def test_empty_mask(self, rng):
        x, y = planted_dataset(rng)
        with pytest.raises(SelectError, match="empty mask"):
            wrapper_fitness(np.zeros(10, dtype=bool), x, y)

    def test_class_smaller_than_folds(self, rng):
        x = rng.standard_normal((6, 3))
        y = np.array([0, 0, 0, 0, 0, 1])
        with pytest.raises(SelectError, match="fewer than"):
            wrapper_fitness(np.ones(3, dtype=bool), x, y, folds=3)

    def test_deterministic(self, rng):
        x, y = planted_dataset(rng)
        bits = np.array([1, 0, 1, 1, 0, 0, 1, 0, 0, 1], dtype=bool)
        a = wrapper_fitness(bits, x, y, folds=5, seed=9)
        b = wrapper_fitness(bits, x, y, folds=5, seed=9)
        assert a == b

    def test_identical_informative_features(self, rng):
        # all columns identical and informative: any single bit is as good
        # as the full mask
        y = np.array([0, 1] * 250)
        base = y + 0.05 * rng.standard_normal(500)
        x = np.tile(base[:, None], (1, 10))
        full = wrapper_fitness(np.ones(10, dtype=bool), x, y, folds=5, seed=0)
        single = np.zeros(10, dtype=bool)
        single[4] = True
        one = wrapper_fitness(single, x, y, folds=5, seed=0)
        assert abs(full - one) <= 0.02


class TestPsoSelect:
    def test_minimal_run(self, rng):
        x, y = planted_dataset(rng)
        report = pso_select(x, y, SwarmConfig(particles=2, iterations=1, seed=0))
        assert report.mask.bits.any()
        assert len(report.trace) == 1

    def test_trace_non_decreasing(self, rng):
        x, y = planted_dataset(rng)
        for seed in range(5):
            report = pso_select(
                x, y, SwarmConfig(particles=6, iterations=10, seed=seed))
            assert np.all(np.diff(report.trace) >= 0)

    def test_planted_feature_recovered(self, rng):
        x, y = planted_dataset(rng)
        hits = 0
        for seed in range(10):
            report = pso_select(
                x, y, SwarmConfig(particles=10, iterations=15, seed=seed))
            if report.mask.bits[3]:
                hits += 1
        assert hits >= 9

    def test_exhaustive_oracle_confirms_singleton(self, rng):
        x, y = planted_dataset(rng, n=40)
        best_bits, best_fit = exhaustive_best_mask(x, y, folds=5, seed=0)
        assert best_bits[3]
        singleton = np.zeros(10, dtype=bool)
        singleton[3] = True
        assert wrapper_fitness(singleton, x, y, folds=5, seed=0) >= best_fit - 1e-12

    def test_reported_fitness_not_stale(self, rng):
        x, y = planted_dataset(rng)
        report = pso_select(x, y, SwarmConfig(particles=8, iterations=10, seed=1))
        fresh = wrapper_fitness(report.mask.bits, x, y, folds=5, seed=1)
        assert report.mask.fitness == fresh

    def test_full_determinism(self, rng):
        x, y = planted_dataset(rng)
        cfg = SwarmConfig(particles=8, iterations=10, seed=4)
        a = pso_select(x, y, cfg)
        b = pso_select(x, y, cfg)
        assert np.array_equal(a.mask.bits, b.mask.bits)
        assert a.trace == b.trace
        assert a.selection_frequency == b.selection_frequency

    def test_single_class_rejected(self, rng):
        x = rng.standard_normal((10, 4))
        with pytest.raises(SelectError, match="two classes"):
            pso_select(x, np.zeros(10, dtype=int))

    def test_report_json(self, rng):
        x, y = planted_dataset(rng)
        report = pso_select(x, y, SwarmConfig(particles=4, iterations=3, seed=0))
        doc = report.to_json()
        assert "mask_bits" in doc and "selection_frequency" in doc


class TestTypes:
    def test_empty_mask_invalid(self):
        with pytest.raises(SelectError):
            FeatureMask(np.zeros(5, dtype=bool), 0.5, 0)

    def test_config_validation(self):
        with pytest.raises(SelectError):
            SwarmConfig(particles=1)
        with pytest.raises(SelectError):
            SwarmConfig(iterations=0)
        with pytest.raises(SelectError):
            SwarmConfig(inertia=1.5)
