"""Gramian Angular Summation Field encoding and raster image utilities."""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources

import numpy as np
from PIL import Image

UNIT_SIGNED = "unit_signed"      # [-1, 1]
UNIT_POSITIVE = "unit_positive"  # [0, 1]

_CLAMP_TOL = 1e-12


class EncodeError(ValueError):
    pass


class DegenerateSignalError(EncodeError):
    """Constant input: min == max, min-max scaling is undefined."""


@dataclass
class GafMatrix:
    values: np.ndarray
    scaling_mode: str = UNIT_SIGNED

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2 or self.values.shape[0] != self.values.shape[1]:
            raise EncodeError("GafMatrix must be square")

    @property
    def n(self) -> int:
        return self.values.shape[0]


@dataclass
class RasterImage:
    pixels: np.ndarray  # (height, width, channels), uint8

    def __post_init__(self):
        self.pixels = np.asarray(self.pixels, dtype=np.uint8)
        if self.pixels.ndim == 2:
            self.pixels = self.pixels[:, :, None]
        if self.pixels.ndim != 3 or self.pixels.shape[2] not in (1, 3):
            raise EncodeError("raster must be (h, w, 1) or (h, w, 3)")

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def channels(self) -> int:
        return self.pixels.shape[2]

    def save_png(self, path):
        arr = self.pixels[:, :, 0] if self.channels == 1 else self.pixels
        Image.fromarray(arr).save(path, format="PNG")

    @classmethod
    def load_png(cls, path) -> "RasterImage":
        img = Image.open(path)
        arr = np.asarray(img)
        return cls(arr)


def round_half_away(x):
    """Round to nearest integer, halves away from zero (element-wise)."""
    x = np.asarray(x, dtype=np.float64)
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def rescale(samples, mode: str = UNIT_SIGNED) -> np.ndarray:
    """Min-max rescale to [0,1] (unit_positive) or [-1,1] (unit_signed)."""
    x = np.asarray(samples, dtype=np.float64)
    if x.size < 2:
        raise EncodeError("need at least 2 samples to rescale")
    lo, hi = x.min(), x.max()
    if hi == lo:
        raise DegenerateSignalError("constant signal: max == min")
    if mode == UNIT_POSITIVE:
        return (x - lo) / (hi - lo)
    if mode == UNIT_SIGNED:
        return ((x - hi) + (x - lo)) / (hi - lo)
    raise EncodeError(f"unknown scaling mode {mode!r}")


def to_polar(scaled) -> np.ndarray:
    """Map scaled samples in [-1,1] to angles arccos(x) in [0, pi]."""
    x = np.asarray(scaled, dtype=np.float64)
    if np.any(x < -1.0 - _CLAMP_TOL) or np.any(x > 1.0 + _CLAMP_TOL):
        bad = x[(x < -1.0 - _CLAMP_TOL) | (x > 1.0 + _CLAMP_TOL)][0]
        raise EncodeError(f"value {bad} outside [-1, 1]")
    return np.arccos(np.clip(x, -1.0, 1.0))


def gasf_matrix(scaled, scaling_mode: str = UNIT_SIGNED) -> GafMatrix:
    """GASF of a scaled sequence: values[i, j] = cos(phi_i + phi_j)."""
    phi = to_polar(scaled)
    values = np.cos(phi[:, None] + phi[None, :])
    return GafMatrix(values, scaling_mode)


def encode_epoch(samples, mode: str = UNIT_SIGNED) -> GafMatrix:
    """Full encoding chain: rescale then build the GASF matrix."""
    return gasf_matrix(rescale(samples, mode), mode)


def quantize_gray(m: GafMatrix, levels: int = 256) -> RasterImage:
    """Quantize matrix values from [-1,1] to `levels` gray values (8-bit)."""
    if not (2 <= levels <= 256):
        raise EncodeError("levels must be in [2, 256]")
    q = round_half_away((m.values + 1.0) / 2.0 * (levels - 1))
    q = np.clip(q, 0, levels - 1)
    if levels < 256:
        q = np.clip(round_half_away(q * 255.0 / (levels - 1)), 0, 255)
    return RasterImage(q.astype(np.uint8))


def quantize_levels(m: GafMatrix, levels: int) -> np.ndarray:
    """Raw level indices 0..levels-1 (co-occurrence input, not display)."""
    if not (2 <= levels <= 256):
        raise EncodeError("levels must be in [2, 256]")
    q = round_half_away((m.values + 1.0) / 2.0 * (levels - 1))
    return np.clip(q, 0, levels - 1).astype(np.uint8)


def _load_colormap(name: str) -> np.ndarray:
    ref = resources.files("gasfeeg.colormaps").joinpath(f"{name}.csv")
    try:
        text = ref.read_text()
    except FileNotFoundError:
        raise EncodeError(f"unknown colormap {name!r}") from None
    table = np.array(
        [[int(v) for v in line.split(",")] for line in text.strip().splitlines()],
        dtype=np.uint8,
    )
    if table.shape != (256, 3):
        raise EncodeError(f"colormap {name!r} is not a 256x3 table")
    return table


def available_colormaps() -> list[str]:
    names = []
    for ref in resources.files("gasfeeg.colormaps").iterdir():
        if ref.name.endswith(".csv"):
            names.append(ref.name[:-4])
    return sorted(names)


def render_rgb(m: GafMatrix, colormap: str = "jet") -> RasterImage:
    """Pseudocolor the matrix through a 256-entry lookup table."""
    table = _load_colormap(colormap)
    gray = quantize_gray(m, 256).pixels[:, :, 0]
    return RasterImage(table[gray])


def augment_image(img: RasterImage, rotation_deg: float = 0.0,
                  shift_px: tuple[int, int] = (0, 0),
                  shear: float = 0.0) -> RasterImage:
    """Affine augmentation: rotate about the center, shear, then shift.

    Nearest-neighbor resampling; pixels sampled outside the source are 0.
    Identity parameters return a byte-identical copy.
    """
    h, w = img.height, img.width
    if h == 0 or w == 0:
        raise EncodeError("empty image")
    dx, dy = shift_px
    if rotation_deg == 0.0 and shear == 0.0 and dx == 0 and dy == 0:
        return RasterImage(img.pixels.copy())
    theta = math.radians(rotation_deg)
    # forward: v_out = M @ (v_in - c) + c + t, with M = shear @ rotation
    rot = np.array([[math.cos(theta), -math.sin(theta)],
                    [math.sin(theta), math.cos(theta)]])
    shr = np.array([[1.0, shear], [0.0, 1.0]])
    fwd = shr @ rot
    inv = np.linalg.inv(fwd)
    cx, cy = (w - 1) / 2.0, (h - 1) / 2.0
    xs, ys = np.meshgrid(np.arange(w, dtype=np.float64),
                         np.arange(h, dtype=np.float64))
    u = xs - cx - dx
    v = ys - cy - dy
    src_x = inv[0, 0] * u + inv[0, 1] * v + cx
    src_y = inv[1, 0] * u + inv[1, 1] * v + cy
    sx = round_half_away(src_x).astype(np.int64)
    sy = round_half_away(src_y).astype(np.int64)
    valid = (sx >= 0) & (sx < w) & (sy >= 0) & (sy < h)
    out = np.zeros_like(img.pixels)
    out[valid] = img.pixels[sy[valid], sx[valid]]
    return RasterImage(out)


def resize_image(img: RasterImage, out_w: int, out_h: int) -> RasterImage:
    """Bilinear resize with corner alignment; same-size requests copy exactly."""
    if out_w < 1 or out_h < 1:
        raise EncodeError("output dimensions must be >= 1")
    h, w = img.height, img.width
    if (out_w, out_h) == (w, h):
        return RasterImage(img.pixels.copy())
    src = img.pixels.astype(np.float64)

    def axis_coords(n_out, n_in):
        if n_out == 1:
            return np.zeros(1)
        return np.arange(n_out) * (n_in - 1) / (n_out - 1)

    ys = axis_coords(out_h, h)
    xs = axis_coords(out_w, w)
    y0 = np.clip(np.floor(ys).astype(np.int64), 0, h - 1)
    x0 = np.clip(np.floor(xs).astype(np.int64), 0, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    fy = (ys - y0)[:, None, None]
    fx = (xs - x0)[None, :, None]
    top = src[y0][:, x0] * (1 - fx) + src[y0][:, x1] * fx
    bot = src[y1][:, x0] * (1 - fx) + src[y1][:, x1] * fx
    out = top * (1 - fy) + bot * fy
    return RasterImage(np.clip(round_half_away(out), 0, 255).astype(np.uint8))
