"""Gray-level co-occurrence statistics, box-counting fractal dimension, and
per-epoch feature-vector assembly for the feature-based classifier path."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import tfr
from .gasf import (RasterImage, DegenerateSignalError, encode_epoch,
                   quantize_levels, UNIT_SIGNED)

FEATURE_NAMES = (
    "st_cluster_shade",
    "st_sum_entropy",
    "wvt_contrast",
    "wvt_fractal_dimension",
    "wvt_difference_variance",
    "set_autocorrelation",
    "set_sum_average",
    "stft_cluster_prominence",
    "stft_info_measure_corr1",
    "stft_homogeneity",
)

DEFAULT_OFFSETS = ((1, 0), (0, 1), (1, 1), (1, -1))


class TextureError(ValueError):
    pass


@dataclass
class CooccurrenceMatrix:
    values: np.ndarray
    levels: int
    offset: tuple[int, int]
    symmetric: bool

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (self.levels, self.levels):
            raise TextureError("co-occurrence matrix shape mismatch")
        total = self.values.sum()
        if abs(total - 1.0) > 1e-12:
            raise TextureError(f"co-occurrence matrix sums to {total}, not 1")


@dataclass
class FeatureVector:
    values: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if tuple(self.values.keys()) != FEATURE_NAMES:
            self.values = {k: float(self.values[k]) for k in FEATURE_NAMES}
        for k, v in self.values.items():
            if not np.isfinite(v):
                raise TextureError(f"non-finite feature {k}")

    def as_array(self) -> np.ndarray:
        return np.array([self.values[k] for k in FEATURE_NAMES])


def glcm(img: RasterImage, offset: tuple[int, int], levels: int,
         symmetric: bool = True) -> CooccurrenceMatrix:
    """Normalized gray-level co-occurrence matrix for one pixel offset.

    offset = (dx, dy): a pair is (pixel at (y, x), pixel at (y+dy, x+dx)).
    Pixels must already be quantized to values < levels.
    """
    dx, dy = offset
    if (dx, dy) == (0, 0):
        raise TextureError("offset must be non-zero")
    gray = img.pixels[:, :, 0].astype(np.int64)
    if gray.max() >= levels:
        raise TextureError(
            f"image has gray value {gray.max()} >= levels {levels}"
        )
    h, w = gray.shape
    y0 = max(0, -dy)
    y1 = min(h, h - dy)
    x0 = max(0, -dx)
    x1 = min(w, w - dx)
    if y0 >= y1 or x0 >= x1:
        raise TextureError("offset larger than image: no valid pixel pairs")
    a = gray[y0:y1, x0:x1].ravel()
    b = gray[y0 + dy:y1 + dy, x0 + dx:x1 + dx].ravel()
    counts = np.zeros((levels, levels), dtype=np.float64)
    np.add.at(counts, (a, b), 1.0)
    if symmetric:
        counts = counts + counts.T
    counts /= counts.sum()
    return CooccurrenceMatrix(counts, levels, (dx, dy), symmetric)


def haralick(P: CooccurrenceMatrix) -> dict[str, float]:
    """Nine co-occurrence statistics (entropies in bits, 0*log0 = 0)."""
    p = P.values
    L = P.levels
    i = np.arange(L, dtype=np.float64)[:, None]
    j = np.arange(L, dtype=np.float64)[None, :]
    px = p.sum(axis=1)
    py = p.sum(axis=0)
    mu_x = float((i[:, 0] * px).sum())
    mu_y = float((j[0, :] * py).sum())

    def xlog2(v):
        v = np.asarray(v, dtype=np.float64)
        out = np.zeros_like(v)
        nz = v > 0
        out[nz] = v[nz] * np.log2(v[nz])
        return out

    # distributions over i+j and |i-j|
    p_sum = np.zeros(2 * L - 1)
    p_diff = np.zeros(L)
    for k in range(L):
        for m in range(L):
            p_sum[k + m] += p[k, m]
            p_diff[abs(k - m)] += p[k, m]
    ks = np.arange(2 * L - 1, dtype=np.float64)
    kd = np.arange(L, dtype=np.float64)

    contrast = float(((i - j) ** 2 * p).sum())
    homogeneity = float((p / (1.0 + (i - j) ** 2)).sum())
    autocorrelation = float((i * j * p).sum())
    shade = float(((i + j - mu_x - mu_y) ** 3 * p).sum())
    prominence = float(((i + j - mu_x - mu_y) ** 4 * p).sum())
    sum_average = float((ks * p_sum).sum())
    sum_entropy = float(-xlog2(p_sum).sum())
    mu_d = float((kd * p_diff).sum())
    difference_variance = float(((kd - mu_d) ** 2 * p_diff).sum())
    hxy = float(-xlog2(p).sum())
    outer = px[:, None] * py[None, :]
    hxy1 = float(-(p[outer > 0] * np.log2(outer[outer > 0])).sum())
    hx = float(-xlog2(px).sum())
    hy = float(-xlog2(py).sum())
    denom = max(hx, hy)
    imc1 = (hxy - hxy1) / denom if denom > 0 else 0.0

    return {
        "contrast": contrast,
        "homogeneity": homogeneity,
        "autocorrelation": autocorrelation,
        "cluster_shade": shade,
        "cluster_prominence": prominence,
        "sum_average": sum_average,
        "sum_entropy": sum_entropy,
        "difference_variance": difference_variance,
        "info_measure_corr1": imc1,
    }


def otsu_threshold(gray: np.ndarray) -> int:
    """Otsu's threshold over an 8-bit (or level-index) grayscale array."""
    hist = np.bincount(gray.ravel(), minlength=256).astype(np.float64)
    total = hist.sum()
    probs = hist / total
    levels = np.arange(256, dtype=np.float64)
    omega = np.cumsum(probs)
    mu = np.cumsum(probs * levels)
    mu_total = mu[-1]
    with np.errstate(divide="ignore", invalid="ignore"):
        sigma_b = (mu_total * omega - mu) ** 2 / (omega * (1.0 - omega))
    sigma_b[~np.isfinite(sigma_b)] = 0.0
    return int(np.argmax(sigma_b))


def fractal_dimension(img: RasterImage, threshold: int | None = None) -> float:
    """Box-counting dimension of the thresholded foreground.

    Binarizes at `threshold` (Otsu when None, foreground = strictly above),
    counts occupied boxes over dyadic box sizes, and returns the negated
    least-squares slope of log(count) against log(size).
    """
    gray = img.pixels[:, :, 0]
    h, w = gray.shape
    if h < 8 or w < 8:
        raise TextureError("image must be at least 8x8")
    if threshold is None:
        threshold = otsu_threshold(gray)
    fg = gray > threshold
    if not fg.any():
        raise TextureError("empty foreground after threshold")
    sizes = []
    s = 2
    while s <= min(h, w) // 2:
        sizes.append(s)
        s *= 2
    counts = []
    for s in sizes:
        nby = -(-h // s)
        nbx = -(-w // s)
        padded = np.zeros((nby * s, nbx * s), dtype=bool)
        padded[:h, :w] = fg
        boxes = padded.reshape(nby, s, nbx, s).any(axis=(1, 3))
        counts.append(boxes.sum())
    slope = np.polyfit(np.log(sizes), np.log(counts), 1)[0]
    return float(-slope)


@dataclass
class TextureSettings:
    glcm_levels: int = 32
    offsets: tuple = DEFAULT_OFFSETS
    symmetric: bool = True
    stft_window: str = "hann"
    stft_window_len: int = 64
    stft_hop: int = 16
    wvd_window: str = "hann"
    wvd_window_len: int = 63
    set_window_len: int = 64
    set_hop: int = 16
    set_delta_bins: float = 1.0
    log_compress: bool = True
    feature_source: str = "transforms"  # or "gasf"
    scaling_mode: str = UNIT_SIGNED


def _mean_haralick(img: RasterImage, settings: TextureSettings) -> dict[str, float]:
    stats_per_offset = [
        haralick(glcm(img, off, settings.glcm_levels, settings.symmetric))
        for off in settings.offsets
    ]
    return {
        key: float(np.mean([s[key] for s in stats_per_offset]))
        for key in stats_per_offset[0]
    }


def assemble_feature_vector(samples, settings: TextureSettings | None = None) -> FeatureVector:
    """Ten-feature texture vector for one epoch.

    Default source: each feature comes from the image of its designated
    time-frequency transform (Stockwell, Wigner-Ville, synchro-extraction,
    STFT). With feature_source="gasf" all ten come from the epoch's GASF
    image instead.
    """
    settings = settings or TextureSettings()
    x = np.asarray(samples, dtype=np.float64)
    if x.size < 4:
        raise TextureError("epoch too short for feature extraction")
    if x.max() == x.min():
        raise DegenerateSignalError("constant epoch: no texture to extract")

    if settings.feature_source == "gasf":
        m = encode_epoch(x, settings.scaling_mode)
        img = RasterImage(quantize_levels(m, settings.glcm_levels))
        images = {"st": img, "wvt": img, "set": img, "stft": img}
    elif settings.feature_source == "transforms":
        spectra = {
            "st": tfr.stockwell(x),
            "wvt": tfr.wigner_ville(x, settings.wvd_window, settings.wvd_window_len),
            "set": tfr.synchro_extract(x, settings.set_window_len,
                                       settings.set_hop, settings.set_delta_bins),
            "stft": tfr.stft(x, settings.stft_window, settings.stft_window_len,
                             settings.stft_hop),
        }
        images = {
            key: tfr.spectrum_to_image(s, settings.log_compress, settings.glcm_levels)
            for key, s in spectra.items()
        }
    else:
        raise TextureError(f"unknown feature_source {settings.feature_source!r}")

    st_stats = _mean_haralick(images["st"], settings)
    wvt_stats = _mean_haralick(images["wvt"], settings)
    set_stats = _mean_haralick(images["set"], settings)
    stft_stats = _mean_haralick(images["stft"], settings)

    return FeatureVector({
        "st_cluster_shade": st_stats["cluster_shade"],
        "st_sum_entropy": st_stats["sum_entropy"],
        "wvt_contrast": wvt_stats["contrast"],
        "wvt_fractal_dimension": fractal_dimension(images["wvt"]),
        "wvt_difference_variance": wvt_stats["difference_variance"],
        "set_autocorrelation": set_stats["autocorrelation"],
        "set_sum_average": set_stats["sum_average"],
        "stft_cluster_prominence": stft_stats["cluster_prominence"],
        "stft_info_measure_corr1": stft_stats["info_measure_corr1"],
        "stft_homogeneity": stft_stats["homogeneity"],
    })


def write_feature_csv(path, vectors: list[FeatureVector], labels: list[str]):
    """Feature table: canonical feature columns plus label, 17 significant
    digits of decimal text."""
    if len(vectors) != len(labels):
        raise TextureError("vectors and labels length mismatch")
    with open(path, "w") as f:
        f.write(",".join(FEATURE_NAMES) + ",label\n")
        for vec, label in zip(vectors, labels):
            row = ",".join("%.17g" % vec.values[k] for k in FEATURE_NAMES)
            f.write(f"{row},{label}\n")


def read_feature_csv(path):
    """Returns (features array n x 10, labels list)."""
    with open(path) as f:
        header = f.readline().strip().split(",")
        if tuple(header[:-1]) != FEATURE_NAMES or header[-1] != "label":
            raise TextureError("unexpected feature CSV header")
        rows, labels = [], []
        for line in f:
            parts = line.strip().split(",")
            if not parts or parts == [""]:
                continue
            rows.append([float(v) for v in parts[:-1]])
            labels.append(parts[-1])
    return np.array(rows), labels
