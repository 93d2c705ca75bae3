"""K-nearest-neighbour outlier screening over cleaned adsorption datasets.

Records are compared by a weighted Euclidean distance over the dataset's
independent variables, with per-variable weights set from the interquartile
range so that the normalisation is robust to the very outliers being hunted.
A record is flagged when the distance-weighted relative difference between
its dependent value and its neighbours' exceeds a threshold.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dataset import DatasetKind, SampleRecord

DEFAULT_K = 5
DEFAULT_THRESHOLD = 0.85

#: Numerator of the IQR weight; any common positive factor cancels in the
#: neighbour weights, so this only fixes the scale of reported distances.
IQR_WEIGHT_SCALE = 10.0


class ZeroIqrError(ValueError):
    """A distance variable has zero interquartile range, so no weight exists."""

    def __init__(self, variable: str):
        super().__init__(f"variable {variable} has zero interquartile range")
        self.variable = variable


@dataclass(frozen=True)
class DistanceWeights:
    """Per-variable weights for the statistical distance."""

    by_variable: dict[str, float]

    def __post_init__(self):
        for name, w in self.by_variable.items():
            if not (math.isfinite(w) and w > 0):
                raise ValueError(f"weight for {name} must be positive and finite, got {w!r}")


@dataclass
class OutlierReport:
    """Per-record weighted relative errors and the resulting outlier flags."""

    ids: list[str]
    r_values: list[float]
    flagged: list[bool]
    threshold: float
    k: int
    neighbor_indices: list[list[int]]
    neighbor_weights: list[list[float]]

    def flagged_ids(self) -> list[str]:
        return [i for i, f in zip(self.ids, self.flagged) if f]

    def inliers(self, records: Sequence[SampleRecord]) -> list[SampleRecord]:
        """The records that were not flagged, in input order."""
        if len(records) != len(self.flagged):
            raise ValueError("record list does not match this report")
        return [rec for rec, f in zip(records, self.flagged) if not f]

    def to_csv(self) -> str:
        """Serialise as ``id,R,flagged,neighbor_ids,neighbor_weights``.

        Neighbour lists are semicolon-joined within their cells.
        """
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["id", "R", "flagged", "neighbor_ids", "neighbor_weights"])
        for i, rec_id in enumerate(self.ids):
            writer.writerow([
                rec_id,
                repr(self.r_values[i]),
                str(self.flagged[i]).lower(),
                ";".join(self.ids[j] for j in self.neighbor_indices[i]),
                ";".join(repr(w) for w in self.neighbor_weights[i]),
            ])
        return out.getvalue()


def quartiles(values: Sequence[float]) -> tuple[float, float]:
    """Lower and upper quartile by linear interpolation at positions p*(n-1)."""
    if len(values) < 2:
        raise ValueError("need at least two values for quartiles")
    q1, q3 = np.percentile(np.asarray(values, dtype=float), [25.0, 75.0])
    return float(q1), float(q3)


def compute_weights(records: Sequence[SampleRecord], variables: Sequence[str]) -> DistanceWeights:
    """IQR-based distance weight for each active variable, over the full dataset."""
    weights: dict[str, float] = {}
    for var in variables:
        values = []
        for rec in records:
            value = getattr(rec, var)
            if value is None:
                raise ValueError(f"record {rec.id} is missing distance variable {var}")
            values.append(value)
        q1, q3 = quartiles(values)
        if q3 - q1 == 0.0:
            raise ZeroIqrError(var)
        weights[var] = IQR_WEIGHT_SCALE / (q3 - q1)
    return DistanceWeights(weights)


def statistical_distance(a: SampleRecord, b: SampleRecord, weights: DistanceWeights) -> float:
    """Weighted Euclidean distance between two records over the active variables."""
    total = 0.0
    for var, w in weights.by_variable.items():
        va = getattr(a, var)
        vb = getattr(b, var)
        if va is None or vb is None:
            raise ValueError(f"distance variable {var} missing from record {a.id if va is None else b.id}")
        total += (w * (va - vb)) ** 2
    return math.sqrt(total)


def weighted_relative_error(
    index: int,
    records: Sequence[SampleRecord],
    weights: DistanceWeights,
    k: int,
    dependent: str,
) -> tuple[float, list[int], list[float]]:
    """Distance-weighted relative error of one record against its k neighbours.

    Neighbours are the k records (excluding ``index``) with the smallest
    statistical distance, ties broken by ascending record index. The weight
    of neighbour j is (S - D_j) / ((k-1) * S) with S the sum of the k
    neighbour distances; when S is zero (k exact duplicates) the weights are
    uniform. The relative error divides the weighted absolute difference of
    dependent values by the smaller of the test record's dependent value and
    the unweighted neighbour mean.

    Returns (R, neighbour indices, neighbour weights).
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    n = len(records)
    if n < k + 1:
        raise ValueError(f"need at least {k + 1} records for k={k}, got {n}")
    rec = records[index]
    dist_index = sorted(
        (statistical_distance(rec, records[j], weights), j)
        for j in range(n) if j != index
    )
    neighbors = [j for _, j in dist_index[:k]]
    dists = np.array([d for d, _ in dist_index[:k]])

    total = float(dists.sum())
    if k == 1 or total == 0.0:
        # Limit of the weight formula as distances coincide (or single neighbour).
        w = np.full(k, 1.0 / k)
    else:
        w = (total - dists) / ((k - 1) * total)

    dep_i = getattr(rec, dependent)
    dep_list = [getattr(records[j], dependent) for j in neighbors]
    if dep_i is None or any(v is None for v in dep_list):
        raise ValueError(f"dependent variable {dependent} missing from record or neighbours")
    dep_n = np.array(dep_list, dtype=float)
    numerator = float(w @ np.abs(dep_i - dep_n))
    denominator = min(float(dep_n.mean()), dep_i)
    return numerator / denominator, neighbors, [float(x) for x in w]


def detect_outliers(
    records: Sequence[SampleRecord],
    kind: DatasetKind,
    k: int = DEFAULT_K,
    threshold: float = DEFAULT_THRESHOLD,
) -> OutlierReport:
    """Flag outliers in a single simultaneous pass over the cleaned dataset.

    Distance weights are computed once from the full dataset (outliers
    included), every record's R value is computed against the full remaining
    dataset, and all records with R > threshold are flagged at once.
    """
    weights = compute_weights(records, kind.independent_vars)
    r_values: list[float] = []
    neighbor_indices: list[list[int]] = []
    neighbor_weights: list[list[float]] = []
    for i in range(len(records)):
        r, neighbors, w = weighted_relative_error(i, records, weights, k, kind.dependent_var)
        r_values.append(r)
        neighbor_indices.append(neighbors)
        neighbor_weights.append(w)
    return OutlierReport(
        ids=[rec.id for rec in records],
        r_values=r_values,
        flagged=[r > threshold for r in r_values],
        threshold=threshold,
        k=k,
        neighbor_indices=neighbor_indices,
        neighbor_weights=neighbor_weights,
    )
