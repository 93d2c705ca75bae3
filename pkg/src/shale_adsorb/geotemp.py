"""Heat-flow filtering and inverse-distance-weighted temperature-gradient interpolation.

Shallow measuring sections track surface conditions rather than the
geotherm, so points above a depth cutoff are dropped before interpolation.
Distances are great-circle (haversine) because the sample sets span
continents.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

EARTH_RADIUS_M = 6_371_000.0
DEFAULT_MIN_SECTION_DEPTH_M = 500.0
DEFAULT_IDW_POWER = 2.0

#: Queries closer than this to a sample return the sample value exactly.
EXACT_HIT_DISTANCE_M = 1.0

HEATFLOW_CSV_COLUMNS = ("lon_deg", "lat_deg", "section_depth_m", "gradt_c_per_km")


@dataclass(frozen=True)
class HeatFlowPoint:
    """A georeferenced temperature-gradient measurement."""

    lon: float             # degrees east
    lat: float             # degrees north
    section_depth: float   # average depth of the measuring section, m
    grad_t: float          # degC per km

    def __post_init__(self):
        if not -180.0 <= self.lon <= 180.0:
            raise ValueError(f"longitude out of range: {self.lon!r}")
        if not -90.0 <= self.lat <= 90.0:
            raise ValueError(f"latitude out of range: {self.lat!r}")
        if not math.isfinite(self.grad_t):
            raise ValueError(f"gradient must be finite, got {self.grad_t!r}")
        if not math.isfinite(self.section_depth):
            raise ValueError(f"section depth must be finite, got {self.section_depth!r}")


def haversine_m(lon1: float, lat1: float, lon2: float, lat2: float) -> float:
    """Great-circle distance in meters between two lon/lat points."""
    lon1, lat1, lon2, lat2 = map(math.radians, (lon1, lat1, lon2, lat2))
    dlon = lon2 - lon1
    dlat = lat2 - lat1
    a = math.sin(dlat / 2.0) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_M * math.asin(math.sqrt(a))


def filter_heatflow(
    points: Sequence[HeatFlowPoint],
    min_depth: float = DEFAULT_MIN_SECTION_DEPTH_M,
) -> list[HeatFlowPoint]:
    """Drop points whose measuring section is shallower than ``min_depth``."""
    return [p for p in points if p.section_depth >= min_depth]


def idw_interpolate(
    samples: Sequence[HeatFlowPoint],
    lon: float,
    lat: float,
    power: float = DEFAULT_IDW_POWER,
    max_neighbors: int | None = None,
) -> float:
    """Inverse-distance-weighted temperature gradient at a query point.

    Weights are 1 / d**power over all samples (or the ``max_neighbors``
    nearest when set). A query within one meter of a sample returns that
    sample's gradient exactly.
    """
    if not samples:
        raise ValueError("cannot interpolate from an empty sample set")
    if power <= 0:
        raise ValueError(f"power must be positive, got {power}")
    distances = [haversine_m(lon, lat, p.lon, p.lat) for p in samples]
    nearest = min(range(len(samples)), key=lambda i: (distances[i], i))
    if distances[nearest] < EXACT_HIT_DISTANCE_M:
        return samples[nearest].grad_t

    order = sorted(range(len(samples)), key=lambda i: (distances[i], i))
    if max_neighbors is not None:
        if max_neighbors < 1:
            raise ValueError(f"max_neighbors must be >= 1, got {max_neighbors}")
        order = order[:max_neighbors]
    numerator = 0.0
    denominator = 0.0
    for i in order:
        w = distances[i] ** -power
        numerator += w * samples[i].grad_t
        denominator += w
    return numerator / denominator


def interpolate_grid(
    samples: Sequence[HeatFlowPoint],
    lon_min: float,
    lon_max: float,
    lat_min: float,
    lat_max: float,
    n_lon: int,
    n_lat: int,
    power: float = DEFAULT_IDW_POWER,
    max_neighbors: int | None = None,
) -> list[tuple[float, float, float]]:
    """Interpolated (lon, lat, gradient) rows on an inclusive regular grid."""
    if n_lon < 1 or n_lat < 1:
        raise ValueError("grid needs at least one point per axis")
    rows = []
    for i in range(n_lat):
        lat = lat_min if n_lat == 1 else lat_min + (lat_max - lat_min) * i / (n_lat - 1)
        for j in range(n_lon):
            lon = lon_min if n_lon == 1 else lon_min + (lon_max - lon_min) * j / (n_lon - 1)
            rows.append((lon, lat, idw_interpolate(samples, lon, lat, power, max_neighbors)))
    return rows


def parse_heatflow(source: str | Iterable[str]) -> list[HeatFlowPoint]:
    """Parse heat-flow CSV (lon_deg, lat_deg, section_depth_m, gradt_c_per_km)."""
    if isinstance(source, str):
        source = io.StringIO(source)
    reader = csv.reader(source)
    try:
        header = next(reader)
    except StopIteration:
        raise ValueError("heat-flow file is empty, header row missing") from None
    if tuple(name.strip() for name in header) != HEATFLOW_CSV_COLUMNS:
        raise ValueError(
            f"heat-flow header must be {','.join(HEATFLOW_CSV_COLUMNS)}, got {','.join(header)}"
        )
    points = []
    for offset, cells in enumerate(reader):
        row = offset + 2
        if not cells or all(cell.strip() == "" for cell in cells):
            continue
        if len(cells) != len(HEATFLOW_CSV_COLUMNS):
            raise ValueError(f"heat-flow row {row}: expected {len(HEATFLOW_CSV_COLUMNS)} fields, got {len(cells)}")
        values = []
        for column, cell in zip(HEATFLOW_CSV_COLUMNS, cells):
            try:
                values.append(float(cell))
            except ValueError:
                raise ValueError(f"heat-flow row {row}, column {column}: not a number: {cell!r}") from None
        try:
            points.append(HeatFlowPoint(*values))
        except ValueError as exc:
            raise ValueError(f"heat-flow row {row}: {exc}") from exc
    return points


def grid_to_csv(rows: Sequence[tuple[float, float, float]]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["lon_deg", "lat_deg", "gradt_c_per_km"])
    for lon, lat, grad in rows:
        writer.writerow([repr(lon), repr(lat), repr(grad)])
    return out.getvalue()
