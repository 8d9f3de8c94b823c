"""Tabular ingest, validation, and normalization for spatial multivariate samples.

A dataset is a flat table: one row per sensor sample, two leading location
columns, then one column per measured attribute.  Everything downstream
(layout, coloring, rendering) consumes the :class:`NormalizedTable` built
here, so this module is the single place where raw values are checked and
scaled.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

# Attribute names used by the bundled synthetic generator: the eight heavy
# pollutants of the motivating sensor dataset, extended with neutral labels
# when more columns are requested.
POLLUTANT_NAMES = ("As", "Cd", "Cr", "Cu", "Hg", "Ni", "Pb", "Zn")

WEIGHT_MODES = ("raw_sum", "normalized_sum")


class DataError(ValueError):
    """Base class for dataset validation failures."""


class MissingHeader(DataError):
    pass


class TooFewAttributes(DataError):
    pass


class NonNumericCell(DataError):
    """Cell cannot be parsed as a number. Coordinates are 1-based, header is row 1."""

    def __init__(self, row: int, col: int):
        self.row = row
        self.col = col
        super().__init__(f"non-numeric cell at row {row}, column {col}")


class InconsistentArity(DataError):
    """Row has the wrong number of fields. Row index is 1-based, header is row 1."""

    def __init__(self, row: int):
        self.row = row
        super().__init__(f"row {row} has the wrong number of fields")


class SpecMismatch(DataError):
    """Synthetic cluster counts do not add up to the requested sample count."""


@dataclass(frozen=True)
class DataTable:
    """Named attributes, 2D sensor locations, and raw per-sample values.

    ``locations`` is (m, 2) in dataset units, ``values`` is (m, n) with one
    column per attribute.  Immutable after construction; validation happens
    once in ``__post_init__``.
    """

    attribute_names: tuple[str, ...]
    locations: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        names = tuple(str(a) for a in self.attribute_names)
        object.__setattr__(self, "attribute_names", names)
        object.__setattr__(self, "locations", np.asarray(self.locations, dtype=float))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))

        n = len(names)
        if n < 3:
            raise TooFewAttributes(f"need at least 3 attributes, got {n}")
        if len(set(names)) != n or any(not a for a in names):
            raise DataError("attribute names must be unique and non-empty")
        if self.locations.ndim != 2 or self.locations.shape[1] != 2:
            raise DataError("locations must be an (m, 2) array")
        m = self.locations.shape[0]
        if m < 1:
            raise DataError("need at least one sample")
        if self.values.shape != (m, n):
            raise DataError(
                f"values must be ({m}, {n}), got {self.values.shape}"
            )
        if not np.all(np.isfinite(self.locations)):
            raise DataError("locations contain NaN or infinite entries")
        if not np.all(np.isfinite(self.values)):
            raise DataError("values contain NaN or infinite entries")

    @property
    def n_samples(self) -> int:
        return self.values.shape[0]

    @property
    def n_attributes(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class NormalizedTable:
    """Per-attribute min-max scaled values plus per-sample weights.

    ``norm_values`` entries are in [0, 1]; constant columns are mapped to a
    flat 0.5 so the attribute stays present without dividing by zero.
    ``sample_weights`` is the per-sample total magnitude used for intensity
    mapping (sum of raw values, or of normalized values for mixed-unit data).
    """

    source: DataTable
    norm_values: np.ndarray
    sample_weights: np.ndarray
    weight_mode: str = "raw_sum"


def normalize(table: DataTable, weight_mode: str = "raw_sum") -> NormalizedTable:
    """Min-max scale each attribute column and compute sample weights.

    Proportion-style placement downstream needs nonnegative, comparable
    weights per attribute, which is what the per-column min-max gives.
    """
    if weight_mode not in WEIGHT_MODES:
        raise ValueError(f"weight_mode must be one of {WEIGHT_MODES}")
    v = table.values
    lo = v.min(axis=0)
    hi = v.max(axis=0)
    span = hi - lo
    constant = span == 0
    safe_span = np.where(constant, 1.0, span)
    norm = (v - lo) / safe_span
    norm[:, constant] = 0.5
    if weight_mode == "raw_sum":
        weights = v.sum(axis=1)
    else:
        weights = norm.sum(axis=1)
    return NormalizedTable(
        source=table,
        norm_values=norm,
        sample_weights=weights,
        weight_mode=weight_mode,
    )


def load_table(path: str | Path, format: str = "csv") -> DataTable:
    """Read a ``x,y,<attr1>,...,<attrN>`` CSV into a validated DataTable.

    The header row is required, every data row must carry exactly 2 + n
    numeric fields, and row order is preserved.  Error coordinates are
    1-based with the header counted as row 1.
    """
    if format != "csv":
        raise ValueError(f"unsupported format: {format!r}")
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MissingHeader("file is empty") from None
        header = [h.strip() for h in header]
        if len(header) < 2 or header[0] != "x" or header[1] != "y":
            raise MissingHeader("header must start with 'x,y'")
        names = header[2:]
        if len(names) < 3:
            raise TooFewAttributes(
                f"need at least 3 attribute columns, got {len(names)}"
            )
        width = len(header)
        locations: list[tuple[float, float]] = []
        rows: list[list[float]] = []
        for lineno, cells in enumerate(reader, start=2):
            if not cells:
                continue
            if len(cells) != width:
                raise InconsistentArity(lineno)
            parsed = []
            for colno, cell in enumerate(cells, start=1):
                try:
                    parsed.append(float(cell))
                except ValueError:
                    raise NonNumericCell(lineno, colno) from None
            locations.append((parsed[0], parsed[1]))
            rows.append(parsed[2:])
    if not rows:
        raise DataError("file has a header but no data rows")
    return DataTable(
        attribute_names=tuple(names),
        locations=np.array(locations, dtype=float),
        values=np.array(rows, dtype=float),
    )


def save_table(table: DataTable, path: str | Path) -> None:
    """Write a DataTable as CSV with shortest round-trip float formatting."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        fh.write("x,y," + ",".join(table.attribute_names) + "\n")
        for loc, row in zip(table.locations, table.values):
            cells = [repr(float(c)) for c in (*loc, *row)]
            fh.write(",".join(cells) + "\n")


def default_attribute_names(n: int) -> tuple[str, ...]:
    if n <= len(POLLUTANT_NAMES):
        return POLLUTANT_NAMES[:n]
    extra = tuple(f"X{i}" for i in range(len(POLLUTANT_NAMES) + 1, n + 1))
    return POLLUTANT_NAMES + extra


@dataclass(frozen=True)
class ClusterSpec:
    """One synthetic cluster: mean attribute proportions, spread, and size."""

    proportions: tuple[float, ...]
    spread: float
    count: int


def generate_synthetic(
    m: int,
    n: int,
    cluster_spec: Sequence[ClusterSpec | tuple] | None = None,
    seed: int = 0,
) -> DataTable:
    """Build a reproducible m-sample, n-attribute table with clustered mixtures.

    Each cluster owns a mean proportion vector; samples draw a perturbed
    proportion profile times a lognormal total load, so values stay
    nonnegative and per-sample mixture structure survives normalization.
    Locations are irregular: a uniform patch around a per-cluster anchor
    plus jitter, clipped to the unit square.  Fixed seed, fixed output.
    """
    if n < 3:
        raise TooFewAttributes(f"need at least 3 attributes, got {n}")
    rng = np.random.default_rng(seed)
    if cluster_spec is None:
        cluster_spec = _default_clusters(m, n, rng)
    clusters = [c if isinstance(c, ClusterSpec) else ClusterSpec(*c) for c in cluster_spec]
    total = sum(c.count for c in clusters)
    if total != m:
        raise SpecMismatch(f"cluster counts sum to {total}, expected {m}")
    for c in clusters:
        if len(c.proportions) != n:
            raise SpecMismatch(
                f"cluster proportions have length {len(c.proportions)}, expected {n}"
            )

    locations = np.empty((m, 2))
    values = np.empty((m, n))
    row = 0
    for c in clusters:
        center = np.clip(np.asarray(c.proportions, dtype=float), 0.0, None)
        anchor = rng.uniform(0.2, 0.8, size=2)
        for _ in range(c.count):
            props = center + rng.normal(0.0, c.spread, size=n)
            props = np.clip(props, 0.0, None)
            s = props.sum()
            props = center / center.sum() if s == 0 else props / s
            load = rng.lognormal(mean=np.log(40.0), sigma=0.45)
            values[row] = load * props
            loc = anchor + rng.uniform(-0.28, 0.28, size=2) + rng.normal(0.0, 0.02, size=2)
            locations[row] = np.clip(loc, 0.01, 0.99)
            row += 1

    return DataTable(
        attribute_names=default_attribute_names(n),
        locations=locations,
        values=values,
    )


def _default_clusters(m: int, n: int, rng: np.random.Generator) -> list[ClusterSpec]:
    """Three clusters with Dirichlet mean profiles, counts splitting m evenly."""
    k = min(3, m)
    counts = [m // k] * k
    for i in range(m - sum(counts)):
        counts[i] += 1
    specs = []
    for count in counts:
        props = rng.dirichlet(np.full(n, 0.8))
        specs.append(ClusterSpec(tuple(props), spread=0.06, count=count))
    return specs
