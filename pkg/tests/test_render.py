"""Kernel regression rendering against a per-pixel brute-force oracle."""

import math

import numpy as np
import pytest
from PIL import Image

from gbc_chroma.colorspace import HslColor, hsl_to_rgb
from gbc_chroma.render import (
    GridSpec,
    IoFailure,
    KernelConfig,
    LengthMismatch,
    RasterField,
    TooFewSamples,
    adaptive_bandwidths,
    akde_render,
    attribute_heatmap,
    export_png,
    extent_from_locations,
    paint_legend,
    png_bytes,
)


def brute_knn_bandwidths(locations, k, scale=1.0):
    """All-pairs neighbor scan; distance to the k-th nearest, scaled."""
    locations = np.asarray(locations, dtype=float)
    m = len(locations)
    out = np.empty(m)
    for i in range(m):
        d = np.sort(np.linalg.norm(locations - locations[i], axis=1))
        out[i] = scale * d[k]  # d[0] is the point itself
    span = locations.max(axis=0) - locations.min(axis=0)
    return np.maximum(out, max(1e-6 * math.hypot(*span), 1e-12))


def brute_render(locations, colors, bandwidths, grid):
    """Direct double loop over pixels and samples; the reference field."""
    xs, ys = grid.pixel_centers()
    pixels = np.empty((grid.height, grid.width, 3), dtype=np.uint8)
    blend = [
        (c.s * math.cos(math.radians(c.h)), c.s * math.sin(math.radians(c.h)), c.l)
        for c in colors
    ]
    for r in range(grid.height):
        for col in range(grid.width):
            num = [0.0, 0.0, 0.0]
            den = 0.0
            for (lx, ly), (a, b, l), h in zip(locations, blend, bandwidths):
                w = math.exp(-((xs[col] - lx) ** 2 + (ys[r] - ly) ** 2) / (2 * h * h))
                den += w
                num[0] += w * a
                num[1] += w * b
                num[2] += w * l
            if den < 1e-300:
                pixels[r, col] = (200, 200, 200)
            else:
                a, b, l = (v / den for v in num)
                s = min(math.hypot(a, b), 1.0)
                hue = math.degrees(math.atan2(b, a)) % 360.0 if s > 0 else 0.0
                rgb = hsl_to_rgb(HslColor(hue, s, min(max(l, 0.0), 1.0)))
                pixels[r, col] = rgb.as_tuple()
    return pixels


def random_scene(rng, m=10):
    locations = rng.uniform(0, 1, (m, 2))
    colors = [
        HslColor(rng.uniform(0, 360), rng.uniform(0, 1), rng.uniform(0.2, 0.9))
        for _ in range(m)
    ]
    bandwidths = rng.uniform(0.08, 0.3, m)
    grid = GridSpec(32, 32, extent_from_locations(locations))
    return locations, colors, bandwidths, grid


class TestAdaptiveBandwidths:
    def test_regular_grid_k1(self):
        xs, ys = np.meshgrid(np.arange(5.0), np.arange(5.0))
        locations = np.column_stack([xs.ravel(), ys.ravel()])
        h = adaptive_bandwidths(locations, KernelConfig(k_neighbors=1, bandwidth_scale=2.0))
        assert np.allclose(h, 2.0)

    def test_isolated_sample_gets_widest_kernel(self, rng):
        cluster = rng.uniform(0, 0.1, (20, 2))
        locations = np.vstack([cluster, [5.0, 5.0]])
        h = adaptive_bandwidths(locations, KernelConfig(k_neighbors=3))
        assert h[-1] > h[:-1].max()

    def test_matches_brute_force_scan(self, rng):
        locations = rng.uniform(0, 10, (300, 2))
        cfg = KernelConfig(k_neighbors=8, bandwidth_scale=1.3)
        h = adaptive_bandwidths(locations, cfg)
        ref = brute_knn_bandwidths(locations, 8, 1.3)
        assert np.allclose(h, ref, atol=0.0)

    def test_too_few_samples(self):
        with pytest.raises(TooFewSamples):
            adaptive_bandwidths(np.zeros((8, 2)), KernelConfig(k_neighbors=8))

    def test_coincident_points_floored(self):
        locations = np.vstack([np.zeros((5, 2)), [[1.0, 1.0]]])
        h = adaptive_bandwidths(locations, KernelConfig(k_neighbors=2))
        assert np.all(h > 0)


class TestAkdeRender:
    def test_constant_color_everywhere(self, rng):
        locations, _, bandwidths, grid = random_scene(rng)
        colors = [HslColor(200.0, 0.7, 0.5)] * len(locations)
        field = akde_render(locations, colors, bandwidths, grid)
        expected = hsl_to_rgb(HslColor(200.0, 0.7, 0.5)).as_tuple()
        # bandwidths keep every pixel supported on this snug grid
        assert np.all(np.abs(field.pixels.astype(int) - expected) <= 1)

    def test_kernel_limit_recovers_sample_color(self):
        grid = GridSpec(4, 4, (0.0, 0.0, 4.0, 4.0))  # centers at 0.5, 1.5, ...
        locations = np.array([[1.5, 2.5], [3.5, 0.5]])
        colors = [HslColor(10, 0.9, 0.4), HslColor(260, 0.5, 0.7)]
        bandwidths = np.array([1e-9, 0.1])
        field = akde_render(locations, colors, bandwidths, grid)
        # sample 0 sits exactly on the pixel center of row 1, col 1
        assert tuple(field.pixels[1, 1]) == hsl_to_rgb(colors[0]).as_tuple()

    def test_equidistant_pixel_blends_midpoint(self):
        grid = GridSpec(3, 1, (0.0, 0.0, 3.0, 1.0))  # centers x = 0.5, 1.5, 2.5
        locations = np.array([[0.5, 0.5], [2.5, 0.5]])
        colors = [HslColor(0, 1.0, 0.3), HslColor(180, 0.5, 0.7)]
        bandwidths = np.array([0.8, 0.8])
        field = akde_render(locations, colors, bandwidths, grid)
        # equal weights: blend coordinates average; hues cancel toward gray
        a = (1.0 * 1 + 0.5 * math.cos(math.pi)) / 2
        b = 0.0
        l = 0.5
        s = min(abs(a), 1.0)
        hue = 0.0 if a >= 0 else 180.0
        want = hsl_to_rgb(HslColor(hue, s, l)).as_tuple()
        assert np.all(np.abs(field.pixels[0, 1].astype(int) - np.array(want)) <= 1)

    def test_matches_brute_force_oracle(self, rng):
        locations, colors, bandwidths, grid = random_scene(rng, m=10)
        field = akde_render(locations, colors, bandwidths, grid)
        ref = brute_render(locations, colors, bandwidths, grid)
        diff = np.abs(field.pixels.astype(int) - ref.astype(int))
        assert diff.max() <= 1

    def test_length_mismatch(self, rng):
        locations, colors, bandwidths, grid = random_scene(rng)
        with pytest.raises(LengthMismatch):
            akde_render(locations, colors[:-1], bandwidths, grid)

    def test_partition_of_unity(self, rng):
        locations, _, bandwidths, grid = random_scene(rng)
        xs, ys = grid.pixel_centers()
        for r in range(0, 32, 5):
            for col in range(0, 32, 5):
                w = np.exp(
                    -((xs[col] - locations[:, 0]) ** 2 + (ys[r] - locations[:, 1]) ** 2)
                    / (2 * bandwidths**2)
                )
                if w.sum() >= 1e-300:
                    assert abs((w / w.sum()).sum() - 1.0) <= 1e-12

    def test_convex_hull_property_per_channel(self, rng):
        from gbc_chroma.render import _akde_fields

        locations, colors, bandwidths, grid = random_scene(rng, m=8)
        blend = np.array(
            [
                (c.s * math.cos(math.radians(c.h)), c.s * math.sin(math.radians(c.h)), c.l)
                for c in colors
            ]
        )
        num, den = _akde_fields(locations, blend, bandwidths, grid)
        u = num / den[:, :, None]
        for ch in range(3):
            assert u[:, :, ch].min() >= blend[:, ch].min() - 1e-9
            assert u[:, :, ch].max() <= blend[:, ch].max() + 1e-9

    def test_resolution_consistency(self, rng):
        locations, colors, bandwidths, grid = random_scene(rng)
        lo = akde_render(locations, colors, bandwidths, grid)
        hi_grid = GridSpec(64, 64, grid.extent)
        hi = akde_render(locations, colors, bandwidths, hi_grid)
        boxed = hi.pixels.astype(float).reshape(32, 2, 32, 2, 3).mean(axis=(1, 3))
        assert np.abs(boxed - lo.pixels.astype(float)).max() <= 3.0

    def test_unsupported_pixels_are_background(self):
        grid = GridSpec(8, 8, (0.0, 0.0, 100.0, 100.0))
        locations = np.array([[0.0, 0.0], [1.0, 1.0], [0.5, 0.2]])
        colors = [HslColor(0, 1, 0.5)] * 3
        bandwidths = np.full(3, 1e-4)
        field = akde_render(locations, colors, bandwidths, grid)
        assert tuple(field.pixels[0, 7]) == (200, 200, 200)


class TestAttributeHeatmap:
    def scene(self, first_column):
        """Normalized table whose column 0 is exactly first_column."""
        from gbc_chroma.data_model import DataTable, NormalizedTable

        m = len(first_column)
        locations = np.column_stack([np.linspace(0.1, 0.9, m), np.full(m, 0.5)])
        values = np.column_stack([first_column, np.zeros(m), np.ones(m)])
        table = DataTable(("a", "b", "c"), locations, values + 1.0)
        norm = NormalizedTable(table, values, values.sum(axis=1))
        grid = GridSpec(24, 8, (0.0, 0.25, 1.0, 0.75))
        bandwidths = np.full(m, 0.25)
        return norm, grid, bandwidths

    def test_all_zero_is_light_anchor(self):
        norm, grid, bandwidths = self.scene(np.zeros(12))
        base = HslColor(120, 1.0, 0.65)
        field = attribute_heatmap(norm, 0, base, grid, KernelConfig(), bandwidths=bandwidths)
        want = hsl_to_rgb(HslColor(120, 1.0, 0.9)).as_tuple()
        assert np.all(np.abs(field.pixels.astype(int) - want) <= 1)

    def test_all_one_is_dark_anchor(self):
        norm, grid, bandwidths = self.scene(np.ones(12))
        base = HslColor(120, 1.0, 0.65)
        field = attribute_heatmap(norm, 0, base, grid, KernelConfig(), bandwidths=bandwidths)
        want = hsl_to_rgb(HslColor(120, 1.0, 0.3)).as_tuple()
        assert np.all(np.abs(field.pixels.astype(int) - want) <= 1)

    def test_bandwidths_computed_from_kernel_config_when_omitted(self):
        norm, grid, _ = self.scene(np.linspace(0, 1, 12))
        base = HslColor(120, 1.0, 0.65)
        cfg = KernelConfig(k_neighbors=3)
        explicit = adaptive_bandwidths(norm.source.locations, cfg)
        a = attribute_heatmap(norm, 0, base, grid, cfg)
        b = attribute_heatmap(norm, 0, base, grid, cfg, bandwidths=explicit)
        assert np.array_equal(a.pixels, b.pixels)

    def test_bad_attribute_index(self):
        norm, grid, bandwidths = self.scene(np.zeros(12))
        with pytest.raises(IndexError):
            attribute_heatmap(norm, 9, HslColor(0, 1, 0.5), grid, KernelConfig(), bandwidths=bandwidths)

    def test_ramp_darkens_monotonically(self):
        values = np.linspace(0, 1, 12)
        norm, grid, bandwidths = self.scene(values)
        locations = norm.source.locations
        base = HslColor(300, 0.8, 0.65)
        field = attribute_heatmap(norm, 0, base, grid, KernelConfig(), bandwidths=bandwidths)
        row = field.pixels[4].astype(int)
        for ch in range(3):
            assert np.all(np.diff(row[:, ch]) <= 0)
        # scalar field oracle: regressed value increases along the ramp
        xs, ys = grid.pixel_centers()
        prev = None
        for col in range(grid.width):
            w = np.exp(
                -((xs[col] - locations[:, 0]) ** 2 + (ys[4] - locations[:, 1]) ** 2)
                / (2 * bandwidths**2)
            )
            v = float(w @ values / w.sum())
            if prev is not None:
                assert v >= prev - 1e-12
            prev = v


class TestExportPng:
    def test_1x1_red_round_trip(self, tmp_path):
        field = RasterField(1, 1, (0, 0, 1, 1), np.array([[[255, 0, 0]]], dtype=np.uint8))
        p = tmp_path / "red.png"
        export_png(field, p)
        back = np.asarray(Image.open(p).convert("RGB"))
        assert tuple(back[0, 0]) == (255, 0, 0)

    def test_lossless_round_trip(self, rng, tmp_path):
        pixels = rng.integers(0, 256, (32, 32, 3), dtype=np.uint8)
        field = RasterField(32, 32, (0, 0, 1, 1), pixels)
        p = tmp_path / "field.png"
        export_png(field, p)
        back = np.asarray(Image.open(p).convert("RGB"))
        assert np.array_equal(back, pixels)

    def test_unwritable_path(self, rng):
        pixels = np.zeros((2, 2, 3), dtype=np.uint8)
        field = RasterField(2, 2, (0, 0, 1, 1), pixels)
        with pytest.raises(IoFailure):
            export_png(field, "/nonexistent-dir/zz/y.png")

    def test_png_bytes_matches_file(self, rng, tmp_path):
        pixels = rng.integers(0, 256, (8, 8, 3), dtype=np.uint8)
        field = RasterField(8, 8, (0, 0, 1, 1), pixels)
        p = tmp_path / "b.png"
        export_png(field, p)
        assert p.read_bytes() == png_bytes(field)


class TestPaintLegend:
    def test_center_pixel_is_default_gray(self):
        field = paint_legend(
            vertex_angles=np.array([0.0, 2 * np.pi / 3, 4 * np.pi / 3]),
            attribute_names=("a", "b", "c"),
            order=(0, 1, 2),
            points=np.array([[0.8, 0.0], [-0.4, 0.6]]),
            point_colors=[HslColor(0, 0.8, 0.65), HslColor(120, 0.7, 0.65)],
            lightness=0.65,
            size=256,
        )
        center = field.pixels[128, 128].astype(int)
        assert np.all(np.abs(center - 166) <= 1)

    def test_corners_are_white(self):
        field = paint_legend(
            vertex_angles=np.array([0.0, 2 * np.pi / 3, 4 * np.pi / 3]),
            attribute_names=("a", "b", "c"),
            order=(0, 1, 2),
            points=np.zeros((0, 2)),
            point_colors=[],
            lightness=0.5,
            size=128,
        )
        assert tuple(field.pixels[0, 0]) == (255, 255, 255)

    def test_rim_hue_convention(self):
        # pixel just inside the rim on the +x axis is red-ish (hue 0)
        field = paint_legend(
            vertex_angles=np.array([0.0, 2 * np.pi / 3, 4 * np.pi / 3]),
            attribute_names=("a", "b", "c"),
            order=(0, 1, 2),
            points=np.zeros((0, 2)),
            point_colors=[],
            lightness=0.5,
            size=512,
        )
        row = field.pixels[256].astype(int)
        x_px = int((0.9 + 1.12) / 2.24 * 512)
        r, g, b = row[x_px]
        assert r > 180 and g < 120 and b < 120
