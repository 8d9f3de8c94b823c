"""Command line front end: render a dataset, synthesize one, or serve the API.

``render`` runs the full pipeline on a CSV and writes the pseudo-colored
map, the legend disc, one heat map per attribute, the layout document, a
delimited per-sample table, and a matplotlib overview figure into the
output directory.  Exit codes: 0 on success, 2 on input validation
problems, 3 on I/O failures.
"""

from __future__ import annotations

import csv
import json
import os
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from .data_model import DataError, generate_synthetic, load_table, save_table
from .render import IoFailure, export_png, png_bytes
from .session import Session, SessionConfig
from .warp import WARP_MODES, gamut_area

MODE_ALIASES = {
    "none": "none",
    "preserve": "color_preserving",
    "contrast": "contrast_enhancement",
    "compress": "comparison_compression",
}

EXIT_INVALID_INPUT = 2
EXIT_IO_FAILURE = 3


@click.group()
@click.version_option(__version__)
def main():
    """Map multivariate spatial samples to colors and render continuous maps."""


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(), help="Input CSV (x,y,<attributes...>).")
@click.option("--mode", default="none", type=click.Choice(sorted(set(MODE_ALIASES) | set(WARP_MODES))), help="Feature extraction mode.")
@click.option("--ellipse-scale", "ellipse_scale", default=2.0, show_default=True, help="PCA ellipse scale factor.")
@click.option("--lightness", default=0.65, show_default=True, help="Fixed lightness of the color disc.")
@click.option("--intensity", is_flag=True, help="Darken samples by total weight.")
@click.option("--shrink", default=0.35, show_default=True, help="Compression target radius factor.")
@click.option("--percentile", default=0.95, show_default=True, help="Radius quantile anchoring color-preserving gain.")
@click.option("--grid", default="512x512", show_default=True, help="Render grid as WxH.")
@click.option("--k-neighbors", default=8, show_default=True, help="Neighbor count for adaptive bandwidths.")
@click.option("--bandwidth-scale", default=1.0, show_default=True, help="Global bandwidth multiplier.")
@click.option("--out", "out_dir", default="out", show_default=True, type=click.Path(), help="Output directory.")
@click.option("--seeded", is_flag=True, help="Pin all output metadata for byte-reproducible runs.")
def render(input_path, mode, ellipse_scale, lightness, intensity, shrink,
           percentile, grid, k_neighbors, bandwidth_scale, out_dir, seeded):
    """Run the pipeline on a CSV and write map, legend, heat maps, and layout."""
    try:
        width, height = (int(v) for v in grid.lower().split("x"))
    except ValueError:
        _fail(EXIT_INVALID_INPUT, f"--grid must look like 512x512, got {grid!r}")

    try:
        table = load_table(input_path)
    except FileNotFoundError:
        _fail(EXIT_INVALID_INPUT, f"input file not found: {input_path}")
    except DataError as exc:
        _fail(EXIT_INVALID_INPUT, str(exc))

    try:
        config = SessionConfig().patched(
            {
                "warp_mode": MODE_ALIASES.get(mode, mode),
                "shrink": shrink,
                "percentile": percentile,
                "ellipse_scale_k": ellipse_scale,
                "lightness": lightness,
                "intensity_on": bool(intensity),
                "grid": (width, height),
                "kernel": {"k_neighbors": k_neighbors, "bandwidth_scale": bandwidth_scale},
            }
        )
    except (ValueError, KeyError) as exc:
        _fail(EXIT_INVALID_INPUT, f"bad configuration: {exc}")

    session = Session(table, config)
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        _write_outputs(session, out, seeded)
    except IoFailure as exc:
        _fail(EXIT_IO_FAILURE, str(exc))
    except DataError as exc:
        _fail(EXIT_INVALID_INPUT, str(exc))
    except ValueError as exc:
        _fail(EXIT_INVALID_INPUT, str(exc))
    except OSError as exc:
        _fail(EXIT_IO_FAILURE, str(exc))
    click.echo(f"wrote {out}/map.png and {table.n_attributes} attribute maps")


def _write_outputs(session: Session, out: Path, seeded: bool):
    table = session.table
    export_png(session.render_map(), out / "map.png")
    export_png(session.render_legend(), out / "legend.png")
    for i, name in enumerate(table.attribute_names):
        export_png(session.render_attribute(i), out / f"attr_{name}.png")
    (out / "layout.json").write_text(session.layout().to_json(), encoding="utf-8")
    _write_samples_csv(session, out / "samples.csv")
    _write_report(session, out / "report.png", seeded)


def _write_samples_csv(session: Session, path: Path):
    """Delimited per-sample record: location, weight, positions, final color."""
    layout = session.layout()
    warped = session.warped_points()
    colors = session.colors()
    weights = session.normalized().sample_weights
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["index", "x", "y", "weight", "disc_x", "disc_y",
             "warped_x", "warped_y", "h", "s", "l", "hex"]
        )
        for i in range(session.table.n_samples):
            c = colors[i]
            writer.writerow(
                [
                    i,
                    repr(float(session.table.locations[i, 0])),
                    repr(float(session.table.locations[i, 1])),
                    repr(float(weights[i])),
                    repr(float(layout.points[i, 0])),
                    repr(float(layout.points[i, 1])),
                    repr(float(warped[i, 0])),
                    repr(float(warped[i, 1])),
                    repr(c.h),
                    repr(c.s),
                    repr(c.l),
                    c.to_rgb().hex,
                ]
            )


def _write_report(session: Session, path: Path, seeded: bool):
    """Three-panel matplotlib overview: legend scatter, map, gamut usage."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    from .warp import WarpMode, apply_warp

    layout = session.layout()
    warped = session.warped_points()
    hexes = [c.to_rgb().hex for c in session.colors()]
    field = session.render_map()

    fig, axes = plt.subplots(1, 3, figsize=(13.5, 4.5))

    ax = axes[0]
    theta = np.linspace(0, 2 * np.pi, 181)
    ax.plot(np.cos(theta), np.sin(theta), color="0.4", lw=1)
    outline = session.ellipse().outline(64)
    ax.plot(outline[:, 0], outline[:, 1], color="0.2", lw=0.8)
    ax.scatter(warped[:, 0], warped[:, 1], c=hexes, s=14, edgecolors="none")
    for v in session.legend_payload()["vertices"]:
        x, y = np.cos(v["angle"]), np.sin(v["angle"])
        ax.scatter([x], [y], c=[v["hex"]], s=60, edgecolors="black", zorder=3)
        ax.annotate(v["name"], (x * 1.12, y * 1.12), ha="center", va="center", fontsize=8)
    ax.set_aspect("equal")
    ax.set_xlim(-1.3, 1.3)
    ax.set_ylim(-1.3, 1.3)
    ax.axis("off")
    ax.set_title("color disc")

    ax = axes[1]
    x_min, y_min, x_max, y_max = field.extent
    ax.imshow(field.pixels, extent=(x_min, x_max, y_min, y_max), origin="upper")
    ax.scatter(session.table.locations[:, 0], session.table.locations[:, 1],
               s=3, c="black", alpha=0.4)
    ax.set_title("pseudo-colored map")

    ax = axes[2]
    areas = []
    labels = []
    for mode_name in ("none", "color_preserving", "contrast_enhancement", "comparison_compression"):
        mode = WarpMode(mode_name, session.config.warp.shrink, session.config.warp.percentile)
        pts = apply_warp(layout.points, mode, session.ellipse())
        areas.append(gamut_area(pts))
        labels.append(mode_name.replace("_", "\n"))
    ax.bar(labels, areas, color="0.6")
    ax.set_ylabel("hull area")
    ax.set_title("gamut usage by mode")
    ax.tick_params(axis="x", labelsize=7)

    fig.tight_layout()
    metadata = {"Software": "gbc-chroma"} if seeded else None
    fig.savefig(path, dpi=110, metadata=metadata)
    plt.close(fig)


@main.command()
@click.option("--m", "m", default=300, show_default=True, help="Sample count.")
@click.option("--n", "n", default=8, show_default=True, help="Attribute count.")
@click.option("--seed", default=0, show_default=True, help="Generator seed.")
@click.option("--out", "out_path", required=True, type=click.Path(), help="Output CSV path.")
def synth(m, n, seed, out_path):
    """Generate a clustered synthetic dataset and save it as CSV."""
    try:
        table = generate_synthetic(m, n, seed=seed)
    except DataError as exc:
        _fail(EXIT_INVALID_INPUT, str(exc))
    try:
        save_table(table, out_path)
    except OSError as exc:
        _fail(EXIT_IO_FAILURE, str(exc))
    click.echo(f"wrote {out_path} ({m} samples, {n} attributes)")


@main.command()
@click.option("--port", default=8000, show_default=True, help="Listen port (GBC_CHROMA_PORT overrides).")
@click.option("--host", default="127.0.0.1", show_default=True, help="Bind address.")
@click.option("--static", "static_dir", default=None, type=click.Path(), help="Directory of UI assets to serve at /.")
def serve(port, host, static_dir):
    """Run the HTTP service (and optionally the bundled UI)."""
    import uvicorn

    from .api import create_app

    port = int(os.environ.get("GBC_CHROMA_PORT", port))
    app = create_app(static_dir=static_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")


if __name__ == "__main__":
    main()
