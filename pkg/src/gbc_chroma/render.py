"""Continuous pseudo-colored rasters from irregular colored samples.

Rendering is Nadaraya-Watson kernel regression with per-sample Gaussian
bandwidths set by the distance to the k-th nearest neighbor: dense sensor
patches get crisp detail, sparse regions blend smoothly.  Colors are blended
in Cartesian hue-saturation coordinates (s*cos h, s*sin h) plus lightness;
averaging hue angles directly would tear at the 0/360 seam, and Cartesian
blending sends disagreeing hues toward the achromatic center, which is the
honest visual statement.  Pixels beyond numerical kernel support render as
neutral background gray rather than extrapolated color.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from PIL import Image, ImageDraw
from scipy.spatial import cKDTree

from .colorspace import HslColor, hsl_to_rgb

BACKGROUND_GRAY = (200, 200, 200)
DENOMINATOR_FLOOR = 1e-300

# Heat map lightness anchors: value 0 renders light, value 1 dark.
HEATMAP_L_HIGH = 0.9
HEATMAP_L_LOW = 0.3


class TooFewSamples(ValueError):
    pass


class LengthMismatch(ValueError):
    pass


class IoFailure(OSError):
    pass


@dataclass(frozen=True)
class KernelConfig:
    """Adaptive-bandwidth parameters for the Gaussian regression kernel."""

    k_neighbors: int = 8
    kernel: str = "gaussian"
    bandwidth_scale: float = 1.0

    def __post_init__(self):
        if self.k_neighbors < 1:
            raise ValueError("k_neighbors must be >= 1")
        if self.kernel != "gaussian":
            raise ValueError(f"unsupported kernel: {self.kernel!r}")
        if self.bandwidth_scale <= 0:
            raise ValueError("bandwidth_scale must be positive")


@dataclass(frozen=True)
class GridSpec:
    """Raster geometry: pixel counts and geo extent (x_min, y_min, x_max, y_max)."""

    width: int
    height: int
    extent: tuple[float, float, float, float]

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("grid must be at least 1x1")
        x_min, y_min, x_max, y_max = self.extent
        if not (x_max > x_min and y_max > y_min):
            raise ValueError(f"degenerate extent: {self.extent}")

    def pixel_centers(self) -> tuple[np.ndarray, np.ndarray]:
        """x centers (width,) left to right, y centers (height,) top to bottom."""
        x_min, y_min, x_max, y_max = self.extent
        xs = x_min + (np.arange(self.width) + 0.5) * (x_max - x_min) / self.width
        ys = y_max - (np.arange(self.height) + 0.5) * (y_max - y_min) / self.height
        return xs, ys


@dataclass(frozen=True)
class RasterField:
    """Row-major RGB pixel grid with its geo extent (row 0 is the top, y_max)."""

    width: int
    height: int
    extent: tuple[float, float, float, float]
    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.shape != (self.height, self.width, 3) or px.dtype != np.uint8:
            raise ValueError("pixels must be a uint8 (height, width, 3) array")
        object.__setattr__(self, "pixels", px)


def extent_from_locations(
    locations: np.ndarray, pad_fraction: float = 0.05
) -> tuple[float, float, float, float]:
    """Bounding box of the samples, padded; degenerate spans get unit padding."""
    locations = np.asarray(locations, dtype=float)
    x_min, y_min = locations.min(axis=0)
    x_max, y_max = locations.max(axis=0)
    dx = x_max - x_min
    dy = y_max - y_min
    pad_x = pad_fraction * dx if dx > 0 else 0.5
    pad_y = pad_fraction * dy if dy > 0 else 0.5
    return (x_min - pad_x, y_min - pad_y, x_max + pad_x, y_max + pad_y)


def adaptive_bandwidths(locations: np.ndarray, cfg: KernelConfig) -> np.ndarray:
    """Per-sample bandwidth: scaled distance to the k-th nearest neighbor.

    Floored at 1e-6 of the bounding-box diagonal so coincident samples keep
    a positive, finite kernel.
    """
    locations = np.asarray(locations, dtype=float)
    m = locations.shape[0]
    if m <= cfg.k_neighbors:
        raise TooFewSamples(
            f"need more than k_neighbors={cfg.k_neighbors} samples, got {m}"
        )
    tree = cKDTree(locations)
    # query k+1 including the point itself at distance zero
    dists, _ = tree.query(locations, k=cfg.k_neighbors + 1)
    h = cfg.bandwidth_scale * dists[:, -1]
    span = locations.max(axis=0) - locations.min(axis=0)
    floor = 1e-6 * float(np.hypot(*span))
    return np.maximum(h, max(floor, 1e-12))


def hsl_fields_to_rgb(h_deg: np.ndarray, s: np.ndarray, l: np.ndarray) -> np.ndarray:
    """Vectorized hexcone HSL to RGB, rounded half-up to uint8.

    Matches colorspace.hsl_to_rgb elementwise; broadcasting inputs is fine.
    """
    h_deg, s, l = np.broadcast_arrays(h_deg, s, l)
    chroma = (1.0 - np.abs(2.0 * l - 1.0)) * s
    hp = np.mod(h_deg, 360.0) / 60.0
    x = chroma * (1.0 - np.abs(np.mod(hp, 2.0) - 1.0))
    zero = np.zeros_like(chroma)
    sextant = np.clip(hp.astype(int), 0, 5)
    r1 = np.choose(sextant, (chroma, x, zero, zero, x, chroma))
    g1 = np.choose(sextant, (x, chroma, chroma, x, zero, zero))
    b1 = np.choose(sextant, (zero, zero, x, chroma, chroma, x))
    m_off = l - chroma / 2.0
    rgb = np.stack([r1 + m_off, g1 + m_off, b1 + m_off], axis=-1)
    return np.floor(rgb * 255.0 + 0.5).astype(np.uint8)


def _akde_fields(
    locations: np.ndarray,
    channels: np.ndarray,
    bandwidths: np.ndarray,
    grid: GridSpec,
) -> tuple[np.ndarray, np.ndarray]:
    """Accumulate kernel-weighted channel sums and the weight denominator.

    The Gaussian exp(-(dx^2+dy^2) / 2h^2) factors into per-axis terms, so
    each sample contributes an outer product instead of a full W*H*m
    tensor.  Returns (numerators (H, W, C), denominator (H, W)).  Samples
    are accumulated in index order, one at a time, so the result does not
    depend on how the pixel grid might be partitioned among workers.
    """
    xs, ys = grid.pixel_centers()
    wx = np.exp(-0.5 * ((xs[None, :] - locations[:, 0:1]) / bandwidths[:, None]) ** 2)
    wy = np.exp(-0.5 * ((ys[None, :] - locations[:, 1:2]) / bandwidths[:, None]) ** 2)
    n_ch = channels.shape[1]
    num = np.empty((grid.height, grid.width, n_ch))
    den = wy.T @ wx
    for c in range(n_ch):
        num[:, :, c] = (wy * channels[:, c : c + 1]).T @ wx
    return num, den


def akde_render(
    locations: np.ndarray,
    colors: Sequence[HslColor],
    bandwidths: np.ndarray,
    grid: GridSpec,
) -> RasterField:
    """Blend sample colors over the grid with per-sample Gaussian kernels."""
    locations = np.asarray(locations, dtype=float)
    bandwidths = np.asarray(bandwidths, dtype=float)
    if not (len(locations) == len(colors) == len(bandwidths)):
        raise LengthMismatch(
            f"got {len(locations)} locations, {len(colors)} colors, "
            f"{len(bandwidths)} bandwidths"
        )
    blend = np.empty((len(colors), 3))
    for i, c in enumerate(colors):
        hr = math.radians(c.h)
        blend[i] = (c.s * math.cos(hr), c.s * math.sin(hr), c.l)
    num, den = _akde_fields(locations, blend, bandwidths, grid)

    supported = den >= DENOMINATOR_FLOOR
    safe_den = np.where(supported, den, 1.0)
    a = num[:, :, 0] / safe_den
    b = num[:, :, 1] / safe_den
    l = np.clip(num[:, :, 2] / safe_den, 0.0, 1.0)
    s = np.minimum(np.hypot(a, b), 1.0)
    h = np.degrees(np.arctan2(b, a)) % 360.0
    h[s == 0] = 0.0
    pixels = hsl_fields_to_rgb(h, s, l)
    pixels[~supported] = BACKGROUND_GRAY
    return RasterField(grid.width, grid.height, grid.extent, pixels)


def attribute_heatmap(
    norm,
    attr: int,
    base: HslColor,
    grid: GridSpec,
    cfg: KernelConfig,
    bandwidths: np.ndarray | None = None,
) -> RasterField:
    """Single-attribute map: base hue and saturation, value drives lightness.

    Regresses the normalized column ``attr`` over the grid with the same
    kernels as the combined map; the value v in [0, 1] maps to lightness
    0.9 - 0.6*v, so a brighter tint means a lower value.  Pass precomputed
    ``bandwidths`` to share the k-NN work across attributes.
    """
    locations = np.asarray(norm.source.locations, dtype=float)
    if not 0 <= attr < norm.norm_values.shape[1]:
        raise IndexError(f"attribute index {attr} out of range")
    values = np.asarray(norm.norm_values[:, attr], dtype=float)
    if bandwidths is None:
        bandwidths = adaptive_bandwidths(locations, cfg)
    if not (len(locations) == len(values) == len(bandwidths)):
        raise LengthMismatch(
            f"got {len(locations)} locations, {len(values)} values, "
            f"{len(bandwidths)} bandwidths"
        )
    num, den = _akde_fields(locations, values[:, None], bandwidths, grid)

    supported = den >= DENOMINATOR_FLOOR
    safe_den = np.where(supported, den, 1.0)
    v = np.clip(num[:, :, 0] / safe_den, 0.0, 1.0)
    l = HEATMAP_L_HIGH - (HEATMAP_L_HIGH - HEATMAP_L_LOW) * v
    pixels = hsl_fields_to_rgb(np.full_like(l, base.h), np.full_like(l, base.s), l)
    pixels[~supported] = BACKGROUND_GRAY
    return RasterField(grid.width, grid.height, grid.extent, pixels)


def png_bytes(field: RasterField) -> bytes:
    """Encode as 8-bit RGB PNG, no interlacing."""
    img = Image.fromarray(field.pixels, mode="RGB")
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return buf.getvalue()


def export_png(field: RasterField, path: str | Path) -> None:
    """Write the field to disk as PNG; I/O problems raise IoFailure."""
    data = png_bytes(field)
    try:
        Path(path).write_bytes(data)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# Legend raster: the color disc itself, doubling as the key from color to
# attribute mixture.

LEGEND_MARGIN = 1.12  # disc coordinates shown per half-image, room for labels


def paint_legend(
    vertex_angles: np.ndarray,
    attribute_names: Sequence[str],
    order: Sequence[int],
    points: np.ndarray,
    point_colors: Sequence[HslColor],
    lightness: float,
    ellipse_outline: np.ndarray | None = None,
    size: int = 512,
) -> RasterField:
    """Paint the hue-saturation wheel with vertices, samples, and the ellipse.

    The wheel is evaluated per pixel (angle to hue, radius to saturation) at
    the given lightness, so its achromatic center shows the session's
    lightness as a pure gray; overlays go on top with the attribute vertices
    pinned to the rim in cyclic order.
    """
    half = LEGEND_MARGIN
    coords = (np.arange(size) + 0.5) / size * (2 * half) - half
    gx = coords[None, :]
    gy = -coords[:, None]  # row 0 is the top of the image
    radius = np.hypot(gx, gy)
    inside = radius <= 1.0

    hue = np.degrees(np.arctan2(gy, gx)) % 360.0
    sat = np.minimum(radius, 1.0)
    wheel = hsl_fields_to_rgb(hue, sat, np.full_like(hue, lightness))
    pixels = np.full((size, size, 3), 255, dtype=np.uint8)
    pixels[inside] = wheel[inside]

    img = Image.fromarray(pixels, mode="RGB")
    draw = ImageDraw.Draw(img)

    def to_px(p) -> tuple[float, float]:
        return (
            (p[0] + half) / (2 * half) * size - 0.5,
            (half - p[1]) / (2 * half) * size - 0.5,
        )

    rim = [to_px((math.cos(t), math.sin(t))) for t in np.linspace(0, 2 * math.pi, 181)]
    draw.line(rim, fill=(90, 90, 90), width=1)

    if ellipse_outline is not None:
        draw.line([to_px(p) for p in ellipse_outline], fill=(60, 60, 60), width=1)

    dot = max(1.5, size / 220.0)
    for p, c in zip(points, point_colors):
        cx, cy = to_px(p)
        rgb_c = hsl_to_rgb(c).as_tuple()
        draw.ellipse([cx - dot, cy - dot, cx + dot, cy + dot], fill=rgb_c)

    vdot = max(3.0, size / 110.0)
    for attr in order:
        ang = float(vertex_angles[attr])
        vx, vy = math.cos(ang), math.sin(ang)
        cx, cy = to_px((vx, vy))
        color = hsl_to_rgb(HslColor(math.degrees(ang), 1.0, lightness)).as_tuple()
        draw.ellipse(
            [cx - vdot, cy - vdot, cx + vdot, cy + vdot],
            fill=color,
            outline=(0, 0, 0),
        )
        lx, ly = to_px((vx * 1.07, vy * 1.07))
        anchor = "lm" if vx >= 0.05 else ("rm" if vx <= -0.05 else "mm")
        draw.text((lx, ly), str(attribute_names[attr]), fill=(0, 0, 0), anchor=anchor)

    extent = (-half, -half, half, half)
    return RasterField(size, size, extent, np.asarray(img, dtype=np.uint8))
