"""Adsorption sample records: CSV ingestion, range-based cleaning, and correlation analysis.

All quantities carry fixed units throughout the package: TOC and vitrinite
reflectance in %, temperature in degrees Celsius, pressure in MPa, adsorbed
volume in m3/t, depth in m.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

# Normalising divisors for the dimensionless regressors: dataset-wide mean
# TOC (%), temperature (degC) and vitrinite reflectance (%).
TOC_NORM_PCT = 4.0
TEMP_NORM_C = 48.0
RO_NORM_PCT = 1.75

ABSOLUTE_ZERO_C = -273.15

SAMPLES_CSV_COLUMNS = (
    "id",
    "reservoir",
    "toc_pct",
    "ro_pct",
    "temp_c",
    "porosity_pct",
    "pl_mpa",
    "vl_m3t",
)

# Reason codes attached to rejected records, in evaluation order.
REASON_MISSING = "missing-field"
REASON_TEMP = "temp-range"
REASON_RO = "ro-range"
REASON_TOC = "toc-range"
REASON_PL = "pl-range"
REASON_VL = "vl-range"
REASON_DUPLICATE = "duplicate"


class SampleParseError(ValueError):
    """A samples CSV row could not be parsed.

    Carries the 1-based row number (header is row 1) and the offending
    column name.
    """

    def __init__(self, row: int, column: str, message: str):
        super().__init__(f"row {row}, column {column}: {message}")
        self.row = row
        self.column = column


def _require_finite(name: str, value: float | None) -> None:
    if value is not None and not math.isfinite(value):
        raise ValueError(f"field {name} must be finite, got {value!r}")


@dataclass(frozen=True)
class SampleRecord:
    """One adsorption-experiment data point."""

    id: str
    reservoir: str
    toc: float                    # total organic carbon, %
    temp: float                   # reservoir temperature, degC
    ro: float | None = None       # vitrinite reflectance, %
    porosity: float | None = None  # porosity, %
    pl: float | None = None       # Langmuir pressure, MPa
    vl: float | None = None       # Langmuir volume, m3/t

    def __post_init__(self):
        for name in ("toc", "temp", "ro", "porosity", "pl", "vl"):
            _require_finite(name, getattr(self, name))
        if self.toc is None or self.toc <= 0:
            raise ValueError(f"field toc must be > 0, got {self.toc!r}")
        if self.temp is None or self.temp <= ABSOLUTE_ZERO_C:
            raise ValueError(f"field temp must be > {ABSOLUTE_ZERO_C} degC, got {self.temp!r}")
        for name in ("ro", "pl", "vl"):
            value = getattr(self, name)
            if value is not None and value <= 0:
                raise ValueError(f"field {name} must be > 0 when present, got {value!r}")

    def value_key(self) -> tuple:
        """Key identifying replicate measurements: every field except the opaque id."""
        return (self.reservoir, self.toc, self.ro, self.temp, self.porosity, self.pl, self.vl)


@dataclass(frozen=True)
class DimensionlessVars:
    """Regressor inputs normalised by the dataset-wide mean values."""

    toc_star: float
    t_star: float
    ro_star: float | None = None


@dataclass
class CleaningOutcome:
    """Partition of the input records into kept and (record, reason) rejections."""

    kept: list[SampleRecord]
    rejected: list[tuple[SampleRecord, str]]


class DatasetKind(Enum):
    """The two fitted datasets, named by their dependent variable."""

    PL = "pl"
    VL = "vl"

    @property
    def dependent_var(self) -> str:
        return self.value

    @property
    def independent_vars(self) -> tuple[str, ...]:
        # Variables used both as regressors and as statistical-distance axes.
        if self is DatasetKind.PL:
            return ("temp", "toc", "ro")
        return ("temp", "toc")


def _parse_float(raw: str, row: int, column: str, required: bool) -> float | None:
    text = raw.strip()
    if text == "":
        if required:
            raise SampleParseError(row, column, "required numeric field is empty")
        return None
    try:
        return float(text)
    except ValueError:
        raise SampleParseError(row, column, f"not a number: {raw!r}") from None


def parse_samples(source: str | Iterable[str]) -> list[SampleRecord]:
    """Parse samples-CSV content into records, preserving row order.

    ``source`` may be the file content as a string or any iterable of lines
    (for example an open text file). Empty optional fields map to ``None``.

    Raises
    ------
    SampleParseError
        On a malformed header, a malformed row, or a field that violates a
        record invariant; the error names the row number and column.
    """
    if isinstance(source, str):
        source = io.StringIO(source)
    reader = csv.reader(source)
    try:
        header = next(reader)
    except StopIteration:
        raise SampleParseError(1, SAMPLES_CSV_COLUMNS[0], "empty file, header row missing") from None
    header = tuple(name.strip() for name in header)
    if header != SAMPLES_CSV_COLUMNS:
        raise SampleParseError(
            1, SAMPLES_CSV_COLUMNS[0],
            f"header must be {','.join(SAMPLES_CSV_COLUMNS)}, got {','.join(header)}",
        )

    records: list[SampleRecord] = []
    for offset, cells in enumerate(reader):
        row = offset + 2
        if not cells or all(cell.strip() == "" for cell in cells):
            continue  # tolerate blank lines
        if len(cells) != len(SAMPLES_CSV_COLUMNS):
            raise SampleParseError(
                row, SAMPLES_CSV_COLUMNS[min(len(cells), len(SAMPLES_CSV_COLUMNS) - 1)],
                f"expected {len(SAMPLES_CSV_COLUMNS)} fields, got {len(cells)}",
            )
        rec_id = cells[0].strip()
        if rec_id == "":
            raise SampleParseError(row, "id", "id must not be empty")
        try:
            record = SampleRecord(
                id=rec_id,
                reservoir=cells[1].strip(),
                toc=_parse_float(cells[2], row, "toc_pct", required=True),
                ro=_parse_float(cells[3], row, "ro_pct", required=False),
                temp=_parse_float(cells[4], row, "temp_c", required=True),
                porosity=_parse_float(cells[5], row, "porosity_pct", required=False),
                pl=_parse_float(cells[6], row, "pl_mpa", required=False),
                vl=_parse_float(cells[7], row, "vl_m3t", required=False),
            )
        except SampleParseError:
            raise
        except ValueError as exc:
            # Invariant violations (e.g. toc <= 0) become parse errors with location.
            raise SampleParseError(row, "record", str(exc)) from exc
        records.append(record)
    return records


def records_to_csv(records: Sequence[SampleRecord]) -> str:
    """Serialise records back to the samples-CSV schema."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(SAMPLES_CSV_COLUMNS)
    for rec in records:
        writer.writerow(_record_cells(rec))
    return out.getvalue()


def _record_cells(rec: SampleRecord) -> list[str]:
    def fmt(value: float | None) -> str:
        return "" if value is None else repr(value)

    return [rec.id, rec.reservoir, fmt(rec.toc), fmt(rec.ro), fmt(rec.temp),
            fmt(rec.porosity), fmt(rec.pl), fmt(rec.vl)]


def rejections_to_csv(rejected: Sequence[tuple[SampleRecord, str]]) -> str:
    """Serialise (record, reason) pairs as samples-CSV rows plus a reason column."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(list(SAMPLES_CSV_COLUMNS) + ["reason"])
    for rec, reason in rejected:
        writer.writerow(_record_cells(rec) + [reason])
    return out.getvalue()


def integrate_replicates(records: Sequence[SampleRecord]) -> tuple[list[SampleRecord], list[SampleRecord]]:
    """Drop exact replicate measurements, keeping the first occurrence.

    Two records are replicates when every field except the opaque id matches
    exactly. Returns (unique, dropped) with input order preserved.
    """
    seen: set[tuple] = set()
    unique: list[SampleRecord] = []
    dropped: list[SampleRecord] = []
    for rec in records:
        key = rec.value_key()
        if key in seen:
            dropped.append(rec)
        else:
            seen.add(key)
            unique.append(rec)
    return unique, dropped


def clean_pl(records: Sequence[SampleRecord]) -> CleaningOutcome:
    """Keep records usable for Langmuir-pressure fitting.

    A record is kept when pl, ro, toc and temp are all present and
    temp < 90, ro < 4, 1 <= toc <= 17 and 1.5 < pl < 12. Rejections carry
    the first failing reason code in the fixed order: presence, temp, ro,
    toc, value range.
    """
    kept: list[SampleRecord] = []
    rejected: list[tuple[SampleRecord, str]] = []
    for rec in records:
        if rec.pl is None or rec.ro is None:
            rejected.append((rec, REASON_MISSING))
        elif not rec.temp < 90.0:
            rejected.append((rec, REASON_TEMP))
        elif not rec.ro < 4.0:
            rejected.append((rec, REASON_RO))
        elif not 1.0 <= rec.toc <= 17.0:
            rejected.append((rec, REASON_TOC))
        elif not 1.5 < rec.pl < 12.0:
            rejected.append((rec, REASON_PL))
        else:
            kept.append(rec)
    return CleaningOutcome(kept, rejected)


def clean_vl(records: Sequence[SampleRecord]) -> CleaningOutcome:
    """Keep records usable for Langmuir-volume fitting.

    A record is kept when vl, toc and temp are present and temp < 90,
    1 <= toc <= 17 and vl > 1.
    """
    kept: list[SampleRecord] = []
    rejected: list[tuple[SampleRecord, str]] = []
    for rec in records:
        if rec.vl is None:
            rejected.append((rec, REASON_MISSING))
        elif not rec.temp < 90.0:
            rejected.append((rec, REASON_TEMP))
        elif not 1.0 <= rec.toc <= 17.0:
            rejected.append((rec, REASON_TOC))
        elif not rec.vl > 1.0:
            rejected.append((rec, REASON_VL))
        else:
            kept.append(rec)
    return CleaningOutcome(kept, rejected)


def clean(records: Sequence[SampleRecord], kind: DatasetKind) -> CleaningOutcome:
    """Apply the cleaning filter matching the dataset kind."""
    return clean_pl(records) if kind is DatasetKind.PL else clean_vl(records)


def to_dimensionless(record: SampleRecord) -> DimensionlessVars:
    """Normalise a record's regressor inputs by the dataset-wide means."""
    if record.toc is None or record.temp is None:
        raise ValueError("record must have toc and temp to be made dimensionless")
    ro_star = None if record.ro is None else record.ro / RO_NORM_PCT
    return DimensionlessVars(
        toc_star=record.toc / TOC_NORM_PCT,
        t_star=record.temp / TEMP_NORM_C,
        ro_star=ro_star,
    )


def pearson_correlation(x: Sequence[float], y: Sequence[float]) -> float:
    """Sample Pearson correlation coefficient of two equal-length sequences.

    Raises ``ValueError`` for unequal lengths, fewer than two points, or a
    zero-variance argument (coefficient undefined).
    """
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    if len(x) < 2:
        raise ValueError("need at least two points")
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    xm = xa - xa.mean()
    ym = ya - ya.mean()
    sxx = float(xm @ xm)
    syy = float(ym @ ym)
    if sxx == 0.0:
        raise ValueError("zero variance in x, correlation undefined")
    if syy == 0.0:
        raise ValueError("zero variance in y, correlation undefined")
    r = float(xm @ ym) / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))


#: Variable pairs examined when choosing regressors, in report order.
CORRELATION_PAIRS = (
    ("temp", "toc"),
    ("temp", "ro"),
    ("temp", "porosity"),
    ("toc", "ro"),
    ("toc", "porosity"),
    ("ro", "porosity"),
)


@dataclass(frozen=True)
class CorrelationRow:
    var_a: str
    var_b: str
    n: int                      # pairwise-complete data size
    abs_r: float | None         # None when undefined (n < 2 or zero variance)


def correlation_table(
    records: Sequence[SampleRecord],
    pairs: Sequence[tuple[str, str]] = CORRELATION_PAIRS,
) -> list[CorrelationRow]:
    """Pairwise-complete data sizes and |r| for each variable pair.

    For each pair only the records where both variables are present are
    used, so the reported ``n`` is the pairwise-complete data size.
    """
    rows = []
    for var_a, var_b in pairs:
        xs, ys = [], []
        for rec in records:
            a = getattr(rec, var_a)
            b = getattr(rec, var_b)
            if a is not None and b is not None:
                xs.append(a)
                ys.append(b)
        try:
            abs_r = abs(pearson_correlation(xs, ys))
        except ValueError:
            abs_r = None
        rows.append(CorrelationRow(var_a, var_b, len(xs), abs_r))
    return rows
