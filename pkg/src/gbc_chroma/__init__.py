"""Similarity-driven multivariate color mapping on the HSL disc.

Attributes are arranged around the unit circle by similarity, samples are
pulled into the disc by generalized barycentric interpolation of their
normalized values, the disc is read as the fixed-lightness slice of HSL,
and continuous maps are rendered by adaptive kernel regression.
"""

from .colorspace import (
    DEFAULT_LIGHTNESS,
    DEFAULT_LIGHTNESS_RANGE,
    HslColor,
    RgbColor,
    apply_intensity,
    disc_to_hsl,
    hsl_to_rgb,
)
from .data_model import (
    ClusterSpec,
    DataTable,
    NormalizedTable,
    generate_synthetic,
    load_table,
    normalize,
    save_table,
)
from .layout import (
    DistanceMatrix,
    LayoutModel,
    adjacency_cost,
    attribute_distances,
    build_layout,
    gbc_embed,
    order_attributes,
)
from .render import (
    GridSpec,
    KernelConfig,
    RasterField,
    adaptive_bandwidths,
    akde_render,
    attribute_heatmap,
    export_png,
    extent_from_locations,
    paint_legend,
    png_bytes,
)
from .session import Session, SessionConfig
from .warp import (
    EllipseModel,
    WarpMode,
    apply_warp,
    ellipse_coord,
    ellipse_point,
    fit_ellipse,
    gamut_area,
    warp_color_preserving,
    warp_compression,
    warp_contrast,
)

__version__ = "0.1.0"
