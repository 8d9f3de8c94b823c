"""Session state: one dataset, one mutable config, lazily cached pipeline stages.

Every derived artifact (normalization, layout, ellipse, warped points,
colors, rasters) is cached under a key built from exactly the config fields
that stage depends on, so changing the lightness never re-runs PCA and
changing the warp never re-renders attribute heat maps.  Config mutations
bump a monotonically increasing version; artifacts are always recomputed or
reused against the current config snapshot, never served stale.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field, replace

import numpy as np

from .colorspace import (
    DEFAULT_LIGHTNESS,
    DEFAULT_LIGHTNESS_RANGE,
    HslColor,
    apply_intensity,
    disc_to_hsl,
)
from .data_model import DataTable, NormalizedTable, WEIGHT_MODES, normalize
from .layout import LayoutModel, attribute_distances, gbc_embed, order_attributes
from .render import (
    GridSpec,
    KernelConfig,
    RasterField,
    adaptive_bandwidths,
    akde_render,
    attribute_heatmap,
    extent_from_locations,
    paint_legend,
)
from .warp import DEFAULT_SCALE_K, EllipseModel, WarpMode, apply_warp, fit_ellipse


@dataclass(frozen=True)
class SessionConfig:
    """Every knob of the pipeline, with the documented defaults."""

    warp: WarpMode = field(default_factory=WarpMode)
    ellipse_scale_k: float = DEFAULT_SCALE_K
    lightness: float = DEFAULT_LIGHTNESS
    intensity_on: bool = False
    l_range: tuple[float, float] = DEFAULT_LIGHTNESS_RANGE
    kernel: KernelConfig = field(default_factory=KernelConfig)
    grid: tuple[int, int] = (512, 512)
    weight_mode: str = "raw_sum"

    def __post_init__(self):
        if self.ellipse_scale_k <= 0:
            raise ValueError("ellipse_scale_k must be positive")
        if not 0.0 <= self.lightness <= 1.0:
            raise ValueError("lightness must be in [0, 1]")
        lo, hi = self.l_range
        if not 0.0 <= lo < hi <= 1.0:
            raise ValueError(f"invalid l_range: {self.l_range}")
        w, h = self.grid
        if w < 1 or h < 1:
            raise ValueError("grid dimensions must be positive")
        if self.weight_mode not in WEIGHT_MODES:
            raise ValueError(f"weight_mode must be one of {WEIGHT_MODES}")

    def as_dict(self) -> dict:
        return {
            "warp_mode": self.warp.mode,
            "shrink": self.warp.shrink,
            "percentile": self.warp.percentile,
            "ellipse_scale_k": self.ellipse_scale_k,
            "lightness": self.lightness,
            "intensity_on": self.intensity_on,
            "l_range": list(self.l_range),
            "kernel": {
                "k_neighbors": self.kernel.k_neighbors,
                "kernel": self.kernel.kernel,
                "bandwidth_scale": self.kernel.bandwidth_scale,
            },
            "grid": list(self.grid),
            "weight_mode": self.weight_mode,
        }

    def patched(self, changes: dict) -> "SessionConfig":
        """New config with the given field updates; unknown keys raise KeyError."""
        cfg = self
        warp = cfg.warp
        kernel = cfg.kernel
        for key, value in changes.items():
            if key == "warp_mode":
                warp = replace(warp, mode=value)
            elif key == "shrink":
                warp = replace(warp, shrink=float(value))
            elif key == "percentile":
                warp = replace(warp, percentile=float(value))
            elif key == "ellipse_scale_k":
                cfg = replace(cfg, ellipse_scale_k=float(value))
            elif key == "lightness":
                cfg = replace(cfg, lightness=float(value))
            elif key == "intensity_on":
                if not isinstance(value, bool):
                    raise ValueError("intensity_on must be a boolean")
                cfg = replace(cfg, intensity_on=value)
            elif key == "l_range":
                lo, hi = value
                cfg = replace(cfg, l_range=(float(lo), float(hi)))
            elif key == "kernel":
                kernel = KernelConfig(
                    k_neighbors=int(value.get("k_neighbors", kernel.k_neighbors)),
                    kernel=value.get("kernel", kernel.kernel),
                    bandwidth_scale=float(
                        value.get("bandwidth_scale", kernel.bandwidth_scale)
                    ),
                )
            elif key == "grid":
                w, h = value
                cfg = replace(cfg, grid=(int(w), int(h)))
            elif key == "weight_mode":
                cfg = replace(cfg, weight_mode=value)
            else:
                raise KeyError(key)
        return replace(cfg, warp=warp, kernel=kernel)


class Session:
    """One loaded dataset plus its config-versioned derived artifacts.

    Mutations are serialized by a per-session lock; reads compute from an
    immutable (version, config) snapshot, so a long render never blocks
    access to artifacts that are already cached.
    """

    def __init__(self, table: DataTable, config: SessionConfig | None = None):
        self.id = uuid.uuid4().hex[:12]
        self.table = table
        self._config = config or SessionConfig()
        self._version = 1
        self._mutate_lock = threading.Lock()
        self._cache: dict = {}
        self._cache_lock = threading.Lock()

    @property
    def version(self) -> int:
        return self._version

    @property
    def config(self) -> SessionConfig:
        return self._config

    def patch_config(self, changes: dict) -> tuple[int, SessionConfig]:
        """Apply field updates atomically; every call bumps the version."""
        with self._mutate_lock:
            self._config = self._config.patched(changes)
            self._version += 1
            return self._version, self._config

    def _memo(self, key, compute):
        with self._cache_lock:
            if key in self._cache:
                return self._cache[key]
        value = compute()
        with self._cache_lock:
            return self._cache.setdefault(key, value)

    # -- pipeline stages, cached by the config fields each one reads --------

    def normalized(self) -> NormalizedTable:
        cfg = self.config
        return self._memo(
            ("norm", cfg.weight_mode),
            lambda: normalize(self.table, weight_mode=cfg.weight_mode),
        )

    def layout(self) -> LayoutModel:
        cfg = self.config
        def build():
            norm = self.normalized()
            order = order_attributes(attribute_distances(norm))
            return gbc_embed(norm, order)
        return self._memo(("layout", cfg.weight_mode), build)

    def ellipse(self) -> EllipseModel:
        cfg = self.config
        key = ("ellipse", cfg.weight_mode, cfg.ellipse_scale_k)
        return self._memo(
            key, lambda: fit_ellipse(self.layout().points, cfg.ellipse_scale_k)
        )

    def warped_points(self) -> np.ndarray:
        cfg = self.config
        key = (
            "warped",
            cfg.weight_mode,
            cfg.ellipse_scale_k,
            cfg.warp.mode,
            cfg.warp.shrink,
            cfg.warp.percentile,
        )
        return self._memo(
            key, lambda: apply_warp(self.layout().points, cfg.warp, self.ellipse())
        )

    def colors(self) -> list[HslColor]:
        """Per-sample colors, intensity-modulated when enabled.

        When every sample weighs the same there is no window to map, so
        intensity falls back to the plain session lightness.
        """
        cfg = self.config
        key = (
            "colors",
            cfg.weight_mode,
            cfg.ellipse_scale_k,
            cfg.warp.mode,
            cfg.warp.shrink,
            cfg.warp.percentile,
            cfg.lightness,
            cfg.intensity_on,
            cfg.l_range,
        )

        def build():
            points = self.warped_points()
            base = [disc_to_hsl(p, cfg.lightness) for p in points]
            if not cfg.intensity_on:
                return base
            weights = self.normalized().sample_weights
            w_lo, w_hi = float(weights.min()), float(weights.max())
            if w_lo >= w_hi:
                return base
            return [
                apply_intensity(c, float(w), w_lo, w_hi, cfg.l_range)
                for c, w in zip(base, weights)
            ]

        return self._memo(key, build)

    def vertex_color(self, attr_index: int) -> HslColor:
        """Color at the attribute's rim vertex; single source for legend and maps."""
        angle = self.layout().vertex_angles[attr_index]
        return disc_to_hsl((np.cos(angle), np.sin(angle)), self.config.lightness)

    def bandwidths(self) -> np.ndarray:
        cfg = self.config
        key = ("bandwidths", cfg.kernel.k_neighbors, cfg.kernel.bandwidth_scale)
        return self._memo(
            key, lambda: adaptive_bandwidths(self.table.locations, cfg.kernel)
        )

    def grid_spec(self) -> GridSpec:
        w, h = self.config.grid
        return GridSpec(w, h, extent_from_locations(self.table.locations))

    def render_map(self) -> RasterField:
        cfg = self.config
        key = (
            "map",
            cfg.weight_mode,
            cfg.ellipse_scale_k,
            cfg.warp.mode,
            cfg.warp.shrink,
            cfg.warp.percentile,
            cfg.lightness,
            cfg.intensity_on,
            cfg.l_range,
            cfg.kernel.k_neighbors,
            cfg.kernel.bandwidth_scale,
            cfg.grid,
        )
        return self._memo(
            key,
            lambda: akde_render(
                self.table.locations, self.colors(), self.bandwidths(), self.grid_spec()
            ),
        )

    def render_attribute(self, attr_index: int) -> RasterField:
        """Heat map of one attribute; independent of the warp by design."""
        cfg = self.config
        key = (
            "attr",
            attr_index,
            cfg.weight_mode,
            cfg.lightness,
            cfg.kernel.k_neighbors,
            cfg.kernel.bandwidth_scale,
            cfg.grid,
        )
        return self._memo(
            key,
            lambda: attribute_heatmap(
                self.normalized(),
                attr_index,
                self.vertex_color(attr_index),
                self.grid_spec(),
                cfg.kernel,
                bandwidths=self.bandwidths(),
            ),
        )

    def render_legend(self, size: int = 512) -> RasterField:
        cfg = self.config
        key = (
            "legend",
            size,
            cfg.weight_mode,
            cfg.ellipse_scale_k,
            cfg.warp.mode,
            cfg.warp.shrink,
            cfg.warp.percentile,
            cfg.lightness,
            cfg.intensity_on,
            cfg.l_range,
        )

        def build():
            lay = self.layout()
            return paint_legend(
                lay.vertex_angles,
                self.table.attribute_names,
                lay.order,
                self.warped_points(),
                self.colors(),
                cfg.lightness,
                ellipse_outline=self.ellipse().outline(64),
                size=size,
            )

        return self._memo(key, build)

    def legend_payload(self) -> dict:
        """Everything a legend view needs: wheel, vertices, points, ellipse."""
        lay = self.layout()
        cfg = self.config
        colors = self.colors()
        vertices = []
        for attr in lay.order:
            color = self.vertex_color(attr)
            vertices.append(
                {
                    "index": int(attr),
                    "name": self.table.attribute_names[attr],
                    "angle": float(lay.vertex_angles[attr]),
                    "color": color.as_dict(),
                    "hex": color.to_rgb().hex,
                }
            )
        ellipse = self.ellipse()
        return {
            "version": self.version,
            "disc": {"center": [0.0, 0.0], "radius": 1.0, "lightness": cfg.lightness},
            "vertices": vertices,
            "points": [[float(x), float(y)] for x, y in self.warped_points()],
            "colors": [
                {**c.as_dict(), "hex": c.to_rgb().hex} for c in colors
            ],
            "ellipse": ellipse.as_dict(),
            "ellipse_outline": [
                [float(x), float(y)] for x, y in ellipse.outline(64)
            ],
        }

    def sample_payload(self, index: int) -> dict:
        """Raw values, weight, color, and legend position of one sample."""
        if not 0 <= index < self.table.n_samples:
            raise IndexError(index)
        color = self.colors()[index]
        point = self.warped_points()[index]
        return {
            "index": index,
            "location": [float(v) for v in self.table.locations[index]],
            "values": {
                name: float(v)
                for name, v in zip(self.table.attribute_names, self.table.values[index])
            },
            "weight": float(self.normalized().sample_weights[index]),
            "color": {**color.as_dict(), "hex": color.to_rgb().hex},
            "position": [float(point[0]), float(point[1])],
        }

    def nearest_sample(self, x: float, y: float) -> tuple[int, float]:
        """Closest sample in dataset units; ties go to the lowest index."""
        d2 = ((self.table.locations - np.array([x, y])) ** 2).sum(axis=1)
        index = int(np.argmin(d2))
        return index, float(np.sqrt(d2[index]))
