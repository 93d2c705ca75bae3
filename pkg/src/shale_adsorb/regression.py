"""Design matrices and ordinary least squares for the Langmuir-parameter models.

Six model forms share one solver: the two geological-parameter models (the
package's own, driven by dimensionless TOC, temperature and maturity) and
four simpler reference forms refit on the same data for comparison. Every
form is linear after its documented transform, so fitting is always a
normal-equation solve on a dense m x n system with n <= 3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .dataset import RO_NORM_PCT, TEMP_NORM_C, TOC_NORM_PCT, SampleRecord

#: Relative pivot threshold below which the normal equations are treated as
#: singular rather than solved into garbage coefficients.
PIVOT_RTOL = 1e-12

CELSIUS_TO_KELVIN = 273.15


class SingularSystemError(ValueError):
    """The normal equations are singular or too ill-conditioned to solve."""


class ModelKind(Enum):
    """Model forms, keyed by dependent variable and regressor recipe."""

    PL_GEO = "pl-geo"          # ln pl = a*toc_star + b*ln(t_star/ro_star) + c
    VL_GEO = "vl-geo"          # ln vl = a*toc_star + b*t_star^3 + c
    PL_INVTEMP = "pl-invtemp"  # ln(1/pl) = a/T + c
    PL_TOCPOW = "pl-tocpow"    # pl = scale * toc^exponent, fit log-log
    VL_TOCPOW = "vl-tocpow"    # vl = scale * toc^exponent, fit log-log
    VL_TOCLIN = "vl-toclin"    # vl = slope*toc + intercept


_KIND_BY_VALUE = {kind.value: kind for kind in ModelKind}


@dataclass(frozen=True)
class ModelSpec:
    """A model kind plus its fitting options.

    ``invtemp_kelvin`` switches the reciprocal-temperature model to absolute
    temperature; by default it uses degrees Celsius as stored.
    """

    kind: ModelKind
    invtemp_kelvin: bool = False

    @property
    def dependent_var(self) -> str:
        return "pl" if self.kind in (ModelKind.PL_GEO, ModelKind.PL_INVTEMP, ModelKind.PL_TOCPOW) else "vl"

    @property
    def required_fields(self) -> tuple[str, ...]:
        if self.kind is ModelKind.PL_GEO:
            return ("toc", "temp", "ro")
        if self.kind is ModelKind.VL_GEO:
            return ("toc", "temp")
        if self.kind is ModelKind.PL_INVTEMP:
            return ("temp",)
        return ("toc",)

    @property
    def coefficient_names(self) -> tuple[str, ...]:
        if self.kind in (ModelKind.PL_GEO, ModelKind.VL_GEO):
            return ("a", "b", "c")
        if self.kind is ModelKind.PL_INVTEMP:
            return ("a", "c")
        if self.kind in (ModelKind.PL_TOCPOW, ModelKind.VL_TOCPOW):
            return ("exponent", "ln_scale")
        return ("slope", "intercept")

    @property
    def n_coefficients(self) -> int:
        return len(self.coefficient_names)

    def feature_row(self, record: SampleRecord) -> list[float]:
        """The regressor row for one record; a trailing 1 carries the intercept."""
        for name in self.required_fields:
            if getattr(record, name) is None:
                raise ValueError(f"record {record.id} is missing field {name} required by {self.kind.value}")
        if self.kind is ModelKind.PL_GEO:
            toc_star = record.toc / TOC_NORM_PCT
            t_star = record.temp / TEMP_NORM_C
            ro_star = record.ro / RO_NORM_PCT
            return [toc_star, math.log(t_star / ro_star), 1.0]
        if self.kind is ModelKind.VL_GEO:
            toc_star = record.toc / TOC_NORM_PCT
            t_star = record.temp / TEMP_NORM_C
            return [toc_star, t_star ** 3, 1.0]
        if self.kind is ModelKind.PL_INVTEMP:
            t = record.temp + CELSIUS_TO_KELVIN if self.invtemp_kelvin else record.temp
            if t == 0.0:
                raise ValueError(f"record {record.id}: temperature of exactly 0 breaks the reciprocal model")
            return [1.0 / t, 1.0]
        if self.kind in (ModelKind.PL_TOCPOW, ModelKind.VL_TOCPOW):
            return [math.log(record.toc), 1.0]
        return [record.toc, 1.0]

    def response(self, record: SampleRecord) -> float:
        """The transformed dependent value this model regresses on."""
        value = getattr(record, self.dependent_var)
        if value is None:
            raise ValueError(f"record {record.id} is missing dependent variable {self.dependent_var}")
        if self.kind is ModelKind.PL_INVTEMP:
            return -math.log(value)       # ln(1/pl)
        if self.kind is ModelKind.VL_TOCLIN:
            return value
        return math.log(value)

    def inverse_response(self, linear_value: float) -> float:
        """Map a fitted linear response back to the dependent variable's units."""
        if self.kind is ModelKind.PL_INVTEMP:
            return math.exp(-linear_value)
        if self.kind is ModelKind.VL_TOCLIN:
            return linear_value
        return math.exp(linear_value)


@dataclass
class DesignSystem:
    """Dense regression system: m x n matrix of regressors and length-m response."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        if self.x.ndim != 2 or self.y.ndim != 1 or self.x.shape[0] != self.y.shape[0]:
            raise ValueError(f"inconsistent system shapes {self.x.shape} and {self.y.shape}")
        if not (np.isfinite(self.x).all() and np.isfinite(self.y).all()):
            raise ValueError("design system contains non-finite entries")


@dataclass(frozen=True)
class FittedModel:
    """A model spec together with its fitted coefficient vector."""

    spec: ModelSpec
    coefficients: tuple[float, ...]
    n_fit: int

    def __post_init__(self):
        if len(self.coefficients) != self.spec.n_coefficients:
            raise ValueError(
                f"{self.spec.kind.value} needs {self.spec.n_coefficients} coefficients, "
                f"got {len(self.coefficients)}"
            )

    def predict(self, record: SampleRecord) -> float:
        """Predicted dependent value (pl in MPa or vl in m3/t) for one record."""
        row = self.spec.feature_row(record)
        linear = float(np.dot(row, self.coefficients))
        return self.spec.inverse_response(linear)


def build_design(records: Sequence[SampleRecord], spec: ModelSpec) -> DesignSystem:
    """Assemble the regression system for a cleaned record list."""
    rows = [spec.feature_row(rec) for rec in records]
    y = [spec.response(rec) for rec in records]
    return DesignSystem(np.array(rows, dtype=float).reshape(len(rows), spec.n_coefficients), np.array(y))


def _solve_with_pivoting(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Gaussian elimination with partial pivoting on a small dense system."""
    a = a.copy()
    b = b.copy()
    n = a.shape[0]
    scale = float(np.abs(a).max())
    if scale == 0.0:
        raise SingularSystemError("normal-equation matrix is zero")
    for col in range(n):
        pivot_row = col + int(np.argmax(np.abs(a[col:, col])))
        pivot = a[pivot_row, col]
        if abs(pivot) <= PIVOT_RTOL * scale:
            raise SingularSystemError(
                f"normal equations are singular or ill-conditioned (pivot {pivot:.3e} "
                f"below {PIVOT_RTOL:.0e} of scale {scale:.3e})"
            )
        if pivot_row != col:
            a[[col, pivot_row]] = a[[pivot_row, col]]
            b[[col, pivot_row]] = b[[pivot_row, col]]
        for row in range(col + 1, n):
            factor = a[row, col] / a[col, col]
            a[row, col:] -= factor * a[col, col:]
            b[row] -= factor * b[col]
    w = np.zeros(n)
    for row in range(n - 1, -1, -1):
        w[row] = (b[row] - a[row, row + 1:] @ w[row + 1:]) / a[row, row]
    return w


def ols_fit(system: DesignSystem) -> np.ndarray:
    """Least-squares coefficients via the normal equations.

    The n x n system X'X w = X'y is solved directly with partial pivoting;
    the matrix is never inverted explicitly.
    """
    m, n = system.x.shape
    if m < n:
        raise SingularSystemError(f"fewer records ({m}) than coefficients ({n})")
    xtx = system.x.T @ system.x
    xty = system.x.T @ system.y
    return _solve_with_pivoting(xtx, xty)


def fit(records: Sequence[SampleRecord], spec: ModelSpec) -> FittedModel:
    """Build the design system for ``spec`` and solve it."""
    system = build_design(records, spec)
    w = ols_fit(system)
    return FittedModel(spec=spec, coefficients=tuple(float(v) for v in w), n_fit=len(records))


def model_to_text(model: FittedModel) -> str:
    """Key-value text block: kind, full-precision coefficients, and n_fit."""
    lines = [f"kind={model.spec.kind.value}"]
    if model.spec.kind is ModelKind.PL_INVTEMP and model.spec.invtemp_kelvin:
        lines.append("kelvin=true")
    for name, value in zip(model.spec.coefficient_names, model.coefficients):
        lines.append(f"{name}={value!r}")
    lines.append(f"n_fit={model.n_fit}")
    return "\n".join(lines) + "\n"


def model_from_text(text: str) -> FittedModel:
    """Parse a model file produced by :func:`model_to_text`."""
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"model file line {lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        entries[key.strip()] = value.strip()
    if "kind" not in entries:
        raise ValueError("model file is missing the kind entry")
    kind_value = entries.pop("kind")
    if kind_value not in _KIND_BY_VALUE:
        raise ValueError(f"unknown model kind {kind_value!r}")
    kelvin = entries.pop("kelvin", "false").lower() == "true"
    spec = ModelSpec(_KIND_BY_VALUE[kind_value], invtemp_kelvin=kelvin)
    try:
        n_fit = int(entries.pop("n_fit"))
    except KeyError:
        raise ValueError("model file is missing the n_fit entry") from None
    coefficients = []
    for name in spec.coefficient_names:
        if name not in entries:
            raise ValueError(f"model file is missing coefficient {name}")
        coefficients.append(float(entries.pop(name)))
    if entries:
        raise ValueError(f"model file has unexpected entries: {sorted(entries)}")
    return FittedModel(spec=spec, coefficients=tuple(coefficients), n_fit=n_fit)
