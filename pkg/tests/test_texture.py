import numpy as np
import pytest

from gasfeeg.gasf import DegenerateSignalError, RasterImage
from gasfeeg.synth import focal_record, normal_record
from gasfeeg.texture import (CooccurrenceMatrix, FEATURE_NAMES,
                             TextureError, TextureSettings,
                             assemble_feature_vector, fractal_dimension,
                             glcm, haralick, read_feature_csv,
                             write_feature_csv)


def img_of(arr):
    return RasterImage(np.asarray(arr, dtype=np.uint8))


def haralick_bruteforce(p):
    """Independent double-loop evaluation of every statistic."""
    L = p.shape[0]
    mu_x = sum(i * p[i, j] for i in range(L) for j in range(L))
    mu_y = sum(j * p[i, j] for i in range(L) for j in range(L))
    px = [sum(p[i, j] for j in range(L)) for i in range(L)]
    py = [sum(p[i, j] for i in range(L)) for j in range(L)]
    out = dict.fromkeys(
        ["contrast", "homogeneity", "autocorrelation", "cluster_shade",
         "cluster_prominence"], 0.0)
    for i in range(L):
        for j in range(L):
            v = p[i, j]
            out["contrast"] += (i - j) ** 2 * v
            out["homogeneity"] += v / (1 + (i - j) ** 2)
            out["autocorrelation"] += i * j * v
            out["cluster_shade"] += (i + j - mu_x - mu_y) ** 3 * v
            out["cluster_prominence"] += (i + j - mu_x - mu_y) ** 4 * v
    p_sum = {}
    p_diff = {}
    for i in range(L):
        for j in range(L):
            p_sum[i + j] = p_sum.get(i + j, 0.0) + p[i, j]
            p_diff[abs(i - j)] = p_diff.get(abs(i - j), 0.0) + p[i, j]
    out["sum_average"] = sum(k * v for k, v in p_sum.items())
    out["sum_entropy"] = -sum(v * np.log2(v) for v in p_sum.values() if v > 0)
    mu_d = sum(k * v for k, v in p_diff.items())
    out["difference_variance"] = sum((k - mu_d) ** 2 * v
                                     for k, v in p_diff.items())
    hxy = -sum(v * np.log2(v) for v in p.ravel() if v > 0)
    hxy1 = -sum(p[i, j] * np.log2(px[i] * py[j])
                for i in range(L) for j in range(L)
                if px[i] * py[j] > 0 and p[i, j] > 0)
    hx = -sum(v * np.log2(v) for v in px if v > 0)
    hy = -sum(v * np.log2(v) for v in py if v > 0)
    denom = max(hx, hy)
    out["info_measure_corr1"] = (hxy - hxy1) / denom if denom > 0 else 0.0
    return out


class TestGlcm:
    def test_hand_counted_pairs(self):
        m = glcm(img_of([[0, 0], [1, 1]]), (1, 0), 2, symmetric=False)
        assert np.allclose(m.values, [[0.5, 0], [0, 0.5]])

    def test_constant_image_single_cell(self):
        m = glcm(img_of(np.full((4, 4), 3)), (1, 1), 8)
        expected = np.zeros((8, 8))
        expected[3, 3] = 1.0
        assert np.allclose(m.values, expected)

    def test_symmetric_is_transpose_equal(self, rng):
        img = img_of(rng.integers(0, 8, (10, 10)))
        for off in [(1, 0), (0, 1), (1, 1), (1, -1), (2, -3)]:
            m = glcm(img, off, 8, symmetric=True)
            assert np.array_equal(m.values, m.values.T)

    def test_sums_to_one(self, rng):
        img = img_of(rng.integers(0, 16, (12, 9)))
        m = glcm(img, (1, -1), 16)
        assert abs(m.values.sum() - 1.0) < 1e-12

    def test_zero_offset_rejected(self):
        with pytest.raises(TextureError, match="non-zero"):
            glcm(img_of([[0]]), (0, 0), 2)

    def test_offset_larger_than_image(self):
        with pytest.raises(TextureError, match="no valid"):
            glcm(img_of([[0, 1]]), (5, 0), 2)

    def test_levels_too_small(self):
        with pytest.raises(TextureError, match=">= levels"):
            glcm(img_of([[7, 1]]), (1, 0), 4)


class TestHaralick:
    def test_diagonal_matrix(self):
        p = np.zeros((4, 4))
        p[2, 2] = 1.0
        stats = haralick(CooccurrenceMatrix(p, 4, (1, 0), True))
        assert stats["contrast"] == 0.0
        assert stats["homogeneity"] == 1.0

    def test_two_cell_hand_eval(self):
        p = np.array([[0.5, 0.0], [0.0, 0.5]])
        stats = haralick(CooccurrenceMatrix(p, 2, (1, 0), True))
        assert stats["contrast"] == 0.0
        assert stats["autocorrelation"] == 0.5

    def test_uniform_sum_entropy(self):
        p = np.full((2, 2), 0.25)
        stats = haralick(CooccurrenceMatrix(p, 2, (1, 0), True))
        # p_{x+y} = {0: .25, 1: .5, 2: .25}
        assert abs(stats["sum_entropy"] - 1.5) < 1e-12

    def test_bruteforce_oracle_random_glcms(self, rng):
        for _ in range(20):
            raw = rng.random((8, 8))
            raw = raw + raw.T
            p = raw / raw.sum()
            got = haralick(CooccurrenceMatrix(p, 8, (1, 0), True))
            want = haralick_bruteforce(p)
            for key in want:
                assert abs(got[key] - want[key]) < 1e-10, key

    def test_contrast_zero_iff_diagonal(self, rng):
        raw = rng.random((6, 6)) + 0.01
        p = raw / raw.sum()
        stats = haralick(CooccurrenceMatrix(p, 6, (1, 0), False))
        assert stats["contrast"] > 0
        assert stats["homogeneity"] < 1

    def test_homogeneity_range(self, rng):
        for _ in range(10):
            raw = rng.random((5, 5))
            p = raw / raw.sum()
            h = haralick(CooccurrenceMatrix(p, 5, (1, 0), False))["homogeneity"]
            assert 0 < h <= 1


class TestFractalDimension:
    def test_filled_square(self):
        img = img_of(np.full((64, 64), 255))
        assert abs(fractal_dimension(img, threshold=0) - 2.0) <= 0.1

    def test_line(self):
        arr = np.zeros((64, 64))
        arr[32, :] = 255
        assert abs(fractal_dimension(img_of(arr), threshold=0) - 1.0) <= 0.15

    def test_point(self):
        arr = np.zeros((64, 64))
        arr[10, 20] = 255
        assert abs(fractal_dimension(img_of(arr), threshold=0) - 0.0) <= 0.1

    def test_empty_foreground(self):
        with pytest.raises(TextureError, match="empty foreground"):
            fractal_dimension(img_of(np.zeros((16, 16))), threshold=0)

    def test_too_small(self):
        with pytest.raises(TextureError, match="8x8"):
            fractal_dimension(img_of(np.ones((4, 4))))


class TestAssemble:
    def test_vector_shape_and_names(self, rng):
        x = normal_record(256, rng)
        vec = assemble_feature_vector(x)
        assert tuple(vec.values.keys()) == FEATURE_NAMES
        assert len(vec.as_array()) == 10
        assert np.all(np.isfinite(vec.as_array()))

    def test_deterministic(self, rng):
        x = focal_record(256, rng)
        a = assemble_feature_vector(x).as_array()
        b = assemble_feature_vector(x).as_array()
        assert np.array_equal(a, b)

    def test_constant_epoch_rejected(self):
        with pytest.raises(DegenerateSignalError):
            assemble_feature_vector(np.zeros(256))

    def test_gasf_source(self, rng):
        x = normal_record(256, rng)
        vec = assemble_feature_vector(
            x, TextureSettings(feature_source="gasf"))
        assert np.all(np.isfinite(vec.as_array()))

    def test_csv_round_trip(self, tmp_path, rng):
        vecs = [assemble_feature_vector(normal_record(256, rng)),
                assemble_feature_vector(focal_record(256, rng))]
        path = tmp_path / "features.csv"
        write_feature_csv(path, vecs, ["Normal", "Focal"])
        feats, labels = read_feature_csv(path)
        assert feats.shape == (2, 10)
        assert labels == ["Normal", "Focal"]
        assert np.array_equal(feats[0], vecs[0].as_array())
