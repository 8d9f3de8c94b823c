"""HSL disc coloring: positions to colors, HSL to RGB, weight to lightness.

The fixed-lightness slice of HSL is a disc whose center is achromatic, so a
point's polar angle becomes hue and its radius saturation.  Hue zero sits on
the +x axis and grows counterclockwise; the legend and every renderer share
this one convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

DEFAULT_LIGHTNESS = 0.65
DEFAULT_LIGHTNESS_RANGE = (0.25, 0.85)


class DegenerateRange(ValueError):
    """Weight window is empty: w_lo must be strictly below w_hi."""


@dataclass(frozen=True)
class HslColor:
    """Hue in degrees [0, 360), saturation and lightness in [0, 1]."""

    h: float
    s: float
    l: float

    def __post_init__(self):
        object.__setattr__(self, "h", float(self.h) % 360.0)
        if not 0.0 <= self.s <= 1.0:
            raise ValueError(f"saturation out of range: {self.s}")
        if not 0.0 <= self.l <= 1.0:
            raise ValueError(f"lightness out of range: {self.l}")

    def to_rgb(self) -> "RgbColor":
        return hsl_to_rgb(self)

    def as_dict(self) -> dict:
        return {"h": self.h, "s": self.s, "l": self.l}


@dataclass(frozen=True)
class RgbColor:
    """8-bit display color."""

    r: int
    g: int
    b: int

    def __post_init__(self):
        for name, v in (("r", self.r), ("g", self.g), ("b", self.b)):
            if not isinstance(v, int) or not 0 <= v <= 255:
                raise ValueError(f"channel {name} out of range: {v!r}")

    @property
    def hex(self) -> str:
        return f"#{self.r:02X}{self.g:02X}{self.b:02X}"

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.r, self.g, self.b)


def disc_to_hsl(p, l: float = DEFAULT_LIGHTNESS) -> HslColor:
    """Map a unit-disc point to a color: angle is hue, radius is saturation."""
    x, y = float(p[0]), float(p[1])
    r = math.hypot(x, y)
    if r > 1.0 + 1e-9:
        raise ValueError(f"point radius {r} exceeds the unit disc")
    if r == 0.0:
        return HslColor(0.0, 0.0, l)
    h = math.degrees(math.atan2(y, x)) % 360.0
    return HslColor(h, min(r, 1.0), l)


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def hsl_to_rgb(c: HslColor) -> RgbColor:
    """Standard hexcone conversion, channels rounded half-up to 0..255."""
    chroma = (1.0 - abs(2.0 * c.l - 1.0)) * c.s
    hp = c.h / 60.0
    x = chroma * (1.0 - abs(hp % 2.0 - 1.0))
    sextant = int(hp) % 6
    r1, g1, b1 = (
        (chroma, x, 0.0),
        (x, chroma, 0.0),
        (0.0, chroma, x),
        (0.0, x, chroma),
        (x, 0.0, chroma),
        (chroma, 0.0, x),
    )[sextant]
    m = c.l - chroma / 2.0
    return RgbColor(
        _round_half_up(255.0 * (r1 + m)),
        _round_half_up(255.0 * (g1 + m)),
        _round_half_up(255.0 * (b1 + m)),
    )


def apply_intensity(
    c: HslColor,
    weight: float,
    w_lo: float,
    w_hi: float,
    l_range: tuple[float, float] = DEFAULT_LIGHTNESS_RANGE,
) -> HslColor:
    """Darken heavy samples: lightness falls linearly from l_max to l_min.

    The weight is clamped into [w_lo, w_hi] first, so out-of-window samples
    saturate at the range ends.  Hue and saturation are untouched.
    """
    if w_lo >= w_hi:
        raise DegenerateRange(f"w_lo={w_lo} must be below w_hi={w_hi}")
    l_min, l_max = l_range
    if not 0.0 <= l_min < l_max <= 1.0:
        raise ValueError(f"invalid lightness range: {l_range}")
    t = (weight - w_lo) / (w_hi - w_lo)
    t = min(max(t, 0.0), 1.0)
    return HslColor(c.h, c.s, l_max - (l_max - l_min) * t)
