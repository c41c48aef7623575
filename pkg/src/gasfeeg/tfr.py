"""Time-frequency transforms: STFT, Stockwell, pseudo-Wigner-Ville, and
synchro-extraction, plus grayscale rendering of spectra for texture analysis.

All transforms are deterministic, pure functions of their inputs. Frequency
conventions:
  - STFT/SET: rows are bins 0..window_len//2, bin k = k/window_len cycles/sample.
  - Stockwell: rows are voices 0..N//2, voice n = n/N cycles/sample.
  - Wigner-Ville: rows are bins 0..N-1, bin k = k/(2N) cycles/sample (the
    doubled-lag discretization of the analytic signal).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .gasf import RasterImage, round_half_away

STFT = "STFT"
STOCKWELL = "Stockwell"
WIGNER_VILLE = "WignerVille"
SET = "SET"

_KIND_CODES = {STFT: 0, STOCKWELL: 1, WIGNER_VILLE: 2, SET: 3}
_CODE_KINDS = {v: k for k, v in _KIND_CODES.items()}

WINDOWS = ("rectangular", "hann", "gaussian")


class TfrError(ValueError):
    pass


@dataclass
class Spectrum:
    values: np.ndarray  # (freq bins, time frames), complex or real
    kind: str
    frame_hop: int
    window_len: int

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.values.ndim != 2:
            raise TfrError("spectrum must be 2-D")
        if not np.all(np.isfinite(self.values)):
            raise TfrError("spectrum contains non-finite entries")
        if self.kind not in _KIND_CODES:
            raise TfrError(f"unknown spectrum kind {self.kind!r}")

    @property
    def magnitude(self) -> np.ndarray:
        return np.abs(self.values)

    @property
    def energy(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2))


def window_samples(name: str, length: int) -> np.ndarray:
    """Named analysis window of a given length."""
    if length < 1:
        raise TfrError("window length must be >= 1")
    if name == "rectangular":
        return np.ones(length)
    if name == "hann":
        return np.hanning(length)
    if name == "gaussian":
        c = (length - 1) / 2.0
        sigma = length / 6.0
        t = np.arange(length)
        return np.exp(-0.5 * ((t - c) / sigma) ** 2)
    raise TfrError(f"unknown window {name!r}; choose from {WINDOWS}")


def _gaussian_window_derivative(length: int) -> np.ndarray:
    c = (length - 1) / 2.0
    sigma = length / 6.0
    t = np.arange(length)
    w = np.exp(-0.5 * ((t - c) / sigma) ** 2)
    return -(t - c) / sigma**2 * w


def _frame_starts(n: int, window_len: int, hop: int) -> np.ndarray:
    return np.arange(0, n - window_len + 1, hop)


def stft(x, window: str = "hann", window_len: int = 64, hop: int = 16) -> Spectrum:
    """Short-time Fourier transform with 1/T frame normalization.

    Per frame: X(k) = (1/T) * sum_t w(t) x(t) exp(-i 2 pi k t / T); only
    bins 0..T//2 are kept (real input).
    """
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    if window_len > n:
        raise TfrError(f"window_len {window_len} exceeds signal length {n}")
    if hop < 1:
        raise TfrError("hop must be >= 1")
    w = window_samples(window, window_len)
    starts = _frame_starts(n, window_len, hop)
    frames = np.stack([x[s:s + window_len] for s in starts])
    spec = np.fft.rfft(frames * w, axis=1).T / window_len
    return Spectrum(spec, STFT, hop, window_len)


def stockwell(x) -> Spectrum:
    """Stockwell transform, frequency-domain form, one voice per bin.

    Voice n uses a Gaussian localizing window whose width scales as 1/n
    (inverse frequency); the zero-frequency row is the signal mean.
    """
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    if n < 4:
        raise TfrError("need at least 4 samples")
    # voices act on the demeaned signal so the DC bin cannot leak into them;
    # the mean lives exclusively in the zero-frequency row
    spec_full = np.fft.fft(x - np.mean(x))
    n_voices = n // 2 + 1
    out = np.zeros((n_voices, n), dtype=np.complex128)
    out[0, :] = np.mean(x)
    m = np.arange(n)
    m_signed = np.where(m <= n // 2, m, m - n)  # alias-symmetric offsets
    for voice in range(1, n_voices):
        gauss = np.exp(-2.0 * np.pi**2 * m_signed**2 / voice**2)
        shifted = spec_full[(m + voice) % n]
        out[voice, :] = np.fft.ifft(shifted * gauss)
    return Spectrum(out, STOCKWELL, 1, n)


def analytic_signal(x) -> np.ndarray:
    """Analytic extension via the frequency-domain Hilbert construction."""
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    spec = np.fft.fft(x)
    h = np.zeros(n)
    h[0] = 1.0
    if n % 2 == 0:
        h[n // 2] = 1.0
        h[1:n // 2] = 2.0
    else:
        h[1:(n + 1) // 2] = 2.0
    return np.fft.ifft(spec * h)


def wigner_ville(x, smoothing_window: str = "hann", window_len: int = 63) -> Spectrum:
    """Pseudo-Wigner-Ville distribution of the analytic signal.

    Lag products are windowed and Fourier-transformed over the lag axis;
    the Hermitian lag symmetry makes the result real (residue checked).
    """
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    if window_len % 2 == 0:
        raise TfrError("smoothing window length must be odd")
    if window_len > n:
        raise TfrError("smoothing window longer than signal")
    z = analytic_signal(x)
    w = window_samples(smoothing_window, window_len)
    half = (window_len - 1) // 2
    kern = np.zeros((n, n), dtype=np.complex128)
    for t in range(n):
        tau_max = min(half, t, n - 1 - t)
        for tau in range(-tau_max, tau_max + 1):
            kern[t, tau % n] = w[tau + half] * z[t + tau] * np.conj(z[t - tau])
    spec = np.fft.fft(kern, axis=1)
    residue = float(np.max(np.abs(spec.imag))) if spec.size else 0.0
    scale = max(float(np.max(np.abs(spec))), 1.0)
    if residue > 1e-9 * scale:
        raise TfrError(f"unexpected imaginary residue {residue}")
    return Spectrum(spec.real.T.copy(), WIGNER_VILLE, 1, window_len)


def stft_if_estimate(x, window_len: int, hop: int):
    """Gaussian-window STFT plus a per-bin instantaneous-frequency estimate
    (in bins) from the analytic phase derivative (derivative-window ratio)."""
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    if window_len > n:
        raise TfrError(f"window_len {window_len} exceeds signal length {n}")
    w = window_samples("gaussian", window_len)
    dw = _gaussian_window_derivative(window_len)
    starts = _frame_starts(n, window_len, hop)
    frames = np.stack([x[s:s + window_len] for s in starts])
    spec = np.fft.rfft(frames * w, axis=1).T / window_len
    spec_d = np.fft.rfft(frames * dw, axis=1).T / window_len
    bins = np.arange(spec.shape[0], dtype=np.float64)[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(np.abs(spec) > 0, spec_d / np.where(spec == 0, 1, spec), 0.0)
    if_bins = bins - window_len / (2.0 * np.pi) * ratio.imag
    return spec, if_bins


def synchro_extract(x, window_len: int = 64, hop: int = 16,
                    delta_bins: float = 1.0) -> Spectrum:
    """Synchro-extracting transform: keep STFT coefficients whose estimated
    instantaneous frequency lies within delta_bins of their own bin."""
    if delta_bins <= 0:
        raise TfrError("delta_bins must be positive")
    spec, if_bins = stft_if_estimate(x, window_len, hop)
    bins = np.arange(spec.shape[0], dtype=np.float64)[:, None]
    mag = np.abs(spec)
    floor = 1e-12 * max(float(mag.max()), 1e-300)
    keep = (np.abs(if_bins - bins) < delta_bins) & (mag > floor)
    return Spectrum(np.where(keep, spec, 0.0), SET, hop, window_len)


def spectrum_to_image(s: Spectrum, log_compress: bool = True,
                      levels: int = 32) -> RasterImage:
    """Render spectrum magnitudes as a grayscale image of level indices
    0..levels-1 (suitable for co-occurrence analysis). A constant spectrum
    maps to level 0."""
    if not (2 <= levels <= 256):
        raise TfrError("levels must be in [2, 256]")
    mag = s.magnitude.astype(np.float64)
    if mag.size == 0:
        raise TfrError("empty spectrum")
    if log_compress:
        mag = np.log1p(mag)
    lo, hi = mag.min(), mag.max()
    if hi == lo:
        return RasterImage(np.zeros(mag.shape, dtype=np.uint8))
    norm = (mag - lo) / (hi - lo)
    q = np.clip(round_half_away(norm * (levels - 1)), 0, levels - 1)
    return RasterImage(q.astype(np.uint8))


def write_spectrum(s: Spectrum, path):
    """Binary dump: 5 little-endian int32 (kind, rows, cols, hop, window_len)
    then row-major little-endian float64 magnitudes."""
    mag = s.magnitude.astype("<f8")
    rows, cols = mag.shape
    header = struct.pack("<5i", _KIND_CODES[s.kind], rows, cols,
                         s.frame_hop, s.window_len)
    with open(path, "wb") as f:
        f.write(header)
        f.write(mag.tobytes(order="C"))


def read_spectrum(path) -> Spectrum:
    with open(path, "rb") as f:
        kind_code, rows, cols, hop, window_len = struct.unpack("<5i", f.read(20))
        data = np.frombuffer(f.read(rows * cols * 8), dtype="<f8")
    if kind_code not in _CODE_KINDS:
        raise TfrError(f"unknown spectrum kind code {kind_code}")
    return Spectrum(data.reshape(rows, cols), _CODE_KINDS[kind_code],
                    hop, window_len)
