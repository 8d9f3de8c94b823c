"""PCA-ellipse gamut warps: redistribute embedded points across the color disc.

A 2D PCA of the embedded points yields the ellipse that encloses the bulk of
the cloud.  Three warps reshape how much of the hue-saturation gamut the
cloud occupies:

* ``contrast_enhancement``: whitening map, the ellipse is stretched onto the
  full unit disc (points outside are radially clamped to the rim).
* ``color_preserving``: a single radial gain anchored at a radius quantile
  pushes points outward along their own hue ray, so no point changes hue or
  crosses the achromatic center.
* ``comparison_compression``: the whitened cloud is shrunk into a small
  central region; far-away points keep their position, with a linear blend
  band in ellipse radius between the two regimes to stay continuous.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull, QhullError

WARP_MODES = (
    "none",
    "color_preserving",
    "contrast_enhancement",
    "comparison_compression",
)

DEFAULT_SCALE_K = 2.0
DEFAULT_SHRINK = 0.35
DEFAULT_PERCENTILE = 0.95

# Blend band in ellipse-radius units for comparison compression: inside 1.0
# points are fully compressed, beyond BLEND_OUTER they are left in place.
BLEND_OUTER = 1.5

MIN_SEMI_AXIS = 1e-3


class TooFewPoints(ValueError):
    pass


class DegenerateCloud(ValueError):
    """All points sit on the achromatic center; no radial gain exists."""


@dataclass(frozen=True)
class WarpMode:
    """Feature-extraction mode plus its parameters.

    ``shrink`` only matters for comparison compression, ``percentile`` only
    for color preserving; both are validated regardless so a session config
    can never hold an out-of-range value.
    """

    mode: str = "none"
    shrink: float = DEFAULT_SHRINK
    percentile: float = DEFAULT_PERCENTILE

    def __post_init__(self):
        if self.mode not in WARP_MODES:
            raise ValueError(f"mode must be one of {WARP_MODES}")
        if not 0.0 < self.shrink <= 1.0:
            raise ValueError(f"shrink must be in (0, 1], got {self.shrink}")
        if not 0.0 < self.percentile < 1.0:
            raise ValueError(
                f"percentile must be in (0, 1), got {self.percentile}"
            )


@dataclass(frozen=True)
class EllipseModel:
    """PCA-fitted ellipse: center, orthonormal axes, semi-axis lengths a1 >= a2."""

    center: np.ndarray
    axis1: np.ndarray
    axis2: np.ndarray
    a1: float
    a2: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        object.__setattr__(self, "axis1", np.asarray(self.axis1, dtype=float))
        object.__setattr__(self, "axis2", np.asarray(self.axis2, dtype=float))
        if abs(np.dot(self.axis1, self.axis2)) > 1e-9:
            raise ValueError("ellipse axes must be orthogonal")
        for ax in (self.axis1, self.axis2):
            if abs(np.linalg.norm(ax) - 1.0) > 1e-9:
                raise ValueError("ellipse axes must be unit vectors")
        if not self.a1 >= self.a2 > 0:
            raise ValueError(f"semi-axes must satisfy a1 >= a2 > 0, got {self.a1}, {self.a2}")
        # every ellipse point lies within a1 of the center, so this is exact
        if float(np.linalg.norm(self.center)) - self.a1 > 1.0 + 1e-9:
            raise ValueError("ellipse lies entirely outside the unit disc")

    def outline(self, segments: int = 64) -> np.ndarray:
        """(segments + 1, 2) closed polyline tracing the ellipse boundary."""
        t = np.linspace(0.0, 2.0 * np.pi, segments + 1)
        return (
            self.center
            + np.outer(self.a1 * np.cos(t), self.axis1)
            + np.outer(self.a2 * np.sin(t), self.axis2)
        )

    def as_dict(self) -> dict:
        return {
            "center": [float(v) for v in self.center],
            "axis1": [float(v) for v in self.axis1],
            "axis2": [float(v) for v in self.axis2],
            "a1": float(self.a1),
            "a2": float(self.a2),
        }


def fit_ellipse(points: np.ndarray, scale_k: float = DEFAULT_SCALE_K) -> EllipseModel:
    """Fit the distribution ellipse: mean center, covariance eigenvectors as axes.

    Semi-axis i is scale_k * sqrt(eigenvalue_i); the default scale_k = 2
    covers roughly 95% of a Gaussian cloud.  Degenerate clouds are kept
    usable by flooring a2 (and a1) so every warp stays well-defined.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] != 2:
        raise ValueError("points must be an (m, 2) array")
    if points.shape[0] < 2:
        raise TooFewPoints("ellipse fit needs at least 2 points")
    if scale_k <= 0:
        raise ValueError("scale_k must be positive")
    center = points.mean(axis=0)
    cov = np.cov(points, rowvar=False, ddof=1)
    evals, evecs = np.linalg.eigh(cov)  # ascending eigenvalues
    evals = np.clip(evals, 0.0, None)
    a1 = scale_k * float(np.sqrt(evals[1]))
    a2 = scale_k * float(np.sqrt(evals[0]))
    axis1 = evecs[:, 1]
    axis2 = evecs[:, 0]
    axis1 = _canonical_sign(axis1)
    axis2 = _canonical_sign(axis2)
    a1 = max(a1, MIN_SEMI_AXIS)
    a2 = max(a2, MIN_SEMI_AXIS, 0.01 * a1)
    return EllipseModel(center=center, axis1=axis1, axis2=axis2, a1=a1, a2=a2)


def _canonical_sign(v: np.ndarray) -> np.ndarray:
    """Flip so the first nonzero component is positive; axes are sign-free."""
    if v[0] < 0 or (v[0] == 0 and v[1] < 0):
        return -v
    return v


def ellipse_coord(p, e: EllipseModel) -> tuple[float, float]:
    """Coordinates of p in the ellipse frame; radius <= 1 means inside."""
    rel = np.asarray(p, dtype=float) - e.center
    return (
        float(np.dot(rel, e.axis1) / e.a1),
        float(np.dot(rel, e.axis2) / e.a2),
    )


def ellipse_point(coords, e: EllipseModel) -> np.ndarray:
    """Inverse of ellipse_coord."""
    e1, e2 = coords
    return e.center + e1 * e.a1 * e.axis1 + e2 * e.a2 * e.axis2


def _ellipse_coords_bulk(points: np.ndarray, e: EllipseModel) -> np.ndarray:
    rel = points - e.center
    return np.column_stack((rel @ e.axis1 / e.a1, rel @ e.axis2 / e.a2))


def _clamp_to_disc(points: np.ndarray) -> np.ndarray:
    r = np.linalg.norm(points, axis=1)
    over = r > 1.0
    if np.any(over):
        points = points.copy()
        points[over] /= r[over, None]
    return points


def warp_contrast(points: np.ndarray, e: EllipseModel) -> np.ndarray:
    """Whitening map: the ellipse becomes the full unit disc at the origin.

    q = e1 * axis1 + e2 * axis2 in ellipse coordinates, so the ellipse
    boundary lands exactly on the unit circle; anything further out is
    radially clamped to the rim.
    """
    points = np.asarray(points, dtype=float)
    coords = _ellipse_coords_bulk(points, e)
    q = coords[:, 0:1] * e.axis1 + coords[:, 1:2] * e.axis2
    return _clamp_to_disc(q)


def warp_color_preserving(
    points: np.ndarray, e: EllipseModel, percentile: float = DEFAULT_PERCENTILE
) -> np.ndarray:
    """Push points outward along their hue rays toward the rim.

    One global gain g sends the given radius quantile to that same value as
    a target radius (the 0.95 quantile point lands at radius 0.95); each
    point gets min(g, 1/|p|) so nothing leaves the disc, and the origin
    stays fixed.  Angles are exactly preserved: no point crosses the center.
    """
    points = np.asarray(points, dtype=float)
    radii = np.linalg.norm(points, axis=1)
    if np.all(radii == 0):
        raise DegenerateCloud("all points at the origin, radial gain undefined")
    r_q = float(np.quantile(radii, percentile))
    gains = np.ones_like(radii)
    nz = radii > 0
    if r_q > 0:
        g = percentile / r_q
        gains[nz] = np.minimum(g, 1.0 / radii[nz])
    else:
        gains[nz] = 1.0 / radii[nz]
    # ellipse model is unused here by construction: the gain is anchored on
    # point radii so hues cannot drift; parameter kept for a uniform surface
    del e
    return points * gains[:, None]


def warp_compression(
    points: np.ndarray, e: EllipseModel, shrink: float = DEFAULT_SHRINK
) -> np.ndarray:
    """Confine the bulk of the cloud to a small central region.

    Inside the ellipse (radius <= 1) points map to shrink * whitened
    position; beyond BLEND_OUTER they stay put; the band in between blends
    the two maps linearly in ellipse radius, keeping the result continuous.
    """
    if not 0.0 < shrink <= 1.0:
        raise ValueError(f"shrink must be in (0, 1], got {shrink}")
    points = np.asarray(points, dtype=float)
    coords = _ellipse_coords_bulk(points, e)
    rho = np.linalg.norm(coords, axis=1)
    compressed = shrink * (coords[:, 0:1] * e.axis1 + coords[:, 1:2] * e.axis2)
    t = np.clip((rho - 1.0) / (BLEND_OUTER - 1.0), 0.0, 1.0)
    q = (1.0 - t[:, None]) * compressed + t[:, None] * points
    return _clamp_to_disc(q)


def apply_warp(points: np.ndarray, mode: WarpMode, e: EllipseModel) -> np.ndarray:
    """Dispatch on mode; ``none`` is the identity."""
    if mode.mode == "none":
        return np.asarray(points, dtype=float)
    if mode.mode == "color_preserving":
        return warp_color_preserving(points, e, mode.percentile)
    if mode.mode == "contrast_enhancement":
        return warp_contrast(points, e)
    return warp_compression(points, e, mode.shrink)


def gamut_area(points: np.ndarray) -> float:
    """Convex hull area of the points: how much of the disc the cloud uses."""
    points = np.asarray(points, dtype=float)
    if points.shape[0] < 3:
        raise TooFewPoints("hull area needs at least 3 points")
    try:
        return float(ConvexHull(points).volume)  # 2D volume is area
    except QhullError:
        return 0.0  # collinear or coincident cloud spans no area
