"""Adsorbed-gas estimation: the Langmuir isotherm composed with the fitted models.

Reservoir temperature and pressure are either supplied directly or derived
from depth: a linear geotherm above a surface temperature, and hydrostatic
pressure scaled by a pressure coefficient.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Sequence

from .dataset import SampleRecord
from .regression import FittedModel, ModelKind, ModelSpec

WATER_DENSITY_T_PER_M3 = 1.0
GRAVITY_N_PER_KG = 9.8
DEFAULT_SURFACE_TEMP_C = 20.0

# Reference coefficient sets for the two geological-parameter models, fitted
# upstream on 91 pressure records and 184 volume records. Used by the CLI's
# --paper-coefficients mode so estimates can run without local fitting data.
REFERENCE_PL_COEFFICIENTS = (-0.136, 0.715, 1.666)
REFERENCE_VL_COEFFICIENTS = (0.421, -0.067, 0.563)
REFERENCE_PL_N_FIT = 91
REFERENCE_VL_N_FIT = 184

# Input ranges the models were fitted on; estimates outside them still run
# but are tagged with a warning code.
FIT_RANGE_TEMP_MAX_C = 90.0
FIT_RANGE_RO_MAX_PCT = 4.0
FIT_RANGE_TOC_PCT = (1.0, 17.0)

WARN_TEMP = "temp-extrapolation"
WARN_RO = "ro-extrapolation"
WARN_TOC = "toc-extrapolation"

ESTIMATES_CSV_COLUMNS = (
    "reservoir", "depth_m", "toc_pct", "ro_pct", "temp_c",
    "pressure_mpa", "adsorbed_m3t", "warnings",
)


def reference_models() -> tuple[FittedModel, FittedModel]:
    """The two geological-parameter models with the reference coefficients."""
    pl = FittedModel(ModelSpec(ModelKind.PL_GEO), REFERENCE_PL_COEFFICIENTS, REFERENCE_PL_N_FIT)
    vl = FittedModel(ModelSpec(ModelKind.VL_GEO), REFERENCE_VL_COEFFICIENTS, REFERENCE_VL_N_FIT)
    return pl, vl


@dataclass(frozen=True)
class LangmuirParams:
    """Langmuir pressure (MPa) and volume (m3/t) of an adsorption isotherm."""

    pl: float
    vl: float

    def __post_init__(self):
        if not (math.isfinite(self.pl) and self.pl > 0):
            raise ValueError(f"pl must be positive and finite, got {self.pl!r}")
        if not (math.isfinite(self.vl) and self.vl > 0):
            raise ValueError(f"vl must be positive and finite, got {self.vl!r}")


def langmuir_volume(pressure: float, params: LangmuirParams) -> float:
    """Adsorbed volume (m3/t) at a pressure (MPa) on a Langmuir isotherm.

    Evaluated as vl / (1 + pl/pressure) so the half-saturation point
    pressure == pl yields exactly vl / 2.
    """
    if pressure < 0:
        raise ValueError(f"pressure must be nonnegative, got {pressure}")
    if pressure == 0.0:
        return 0.0
    return params.vl / (1.0 + params.pl / pressure)


@dataclass(frozen=True)
class ReservoirSpec:
    """A named reservoir and the inputs needed to estimate its adsorbed gas.

    Temperature comes from ``temp_override`` when set, otherwise from the
    geothermal gradient; pressure comes from ``pressure_override`` when set,
    otherwise from depth and the pressure coefficient ``alpha``.
    """

    name: str
    depth: float                        # m, increasing downward
    toc: float                          # %
    ro: float                           # %
    alpha: float = 1.0                  # reservoir / hydrostatic pressure ratio
    surface_temp: float = DEFAULT_SURFACE_TEMP_C   # degC
    grad_t: float | None = None         # degC per km
    temp_override: float | None = None  # degC
    pressure_override: float | None = None  # MPa

    def __post_init__(self):
        if not self.name:
            raise ValueError("reservoir name must not be empty")
        if not (math.isfinite(self.depth) and self.depth >= 0):
            raise ValueError(f"reservoir {self.name}: depth must be >= 0, got {self.depth!r}")
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise ValueError(f"reservoir {self.name}: alpha must be > 0, got {self.alpha!r}")
        if not (math.isfinite(self.toc) and self.toc > 0):
            raise ValueError(f"reservoir {self.name}: toc must be > 0, got {self.toc!r}")
        if not (math.isfinite(self.ro) and self.ro > 0):
            raise ValueError(f"reservoir {self.name}: ro must be > 0, got {self.ro!r}")
        if self.grad_t is None and self.temp_override is None:
            raise ValueError(
                f"reservoir {self.name}: needs gradt_c_per_km or temp_c to resolve temperature"
            )


def reservoir_temperature(spec: ReservoirSpec) -> float:
    """Reservoir temperature (degC): override, or surface + gradient * depth."""
    if spec.temp_override is not None:
        return spec.temp_override
    if spec.grad_t is None:
        raise ValueError(f"reservoir {spec.name}: no temperature source available")
    return spec.surface_temp + spec.depth / 1000.0 * spec.grad_t


def reservoir_pressure(spec: ReservoirSpec) -> float:
    """Reservoir pressure (MPa): override, or alpha * hydrostatic column."""
    if spec.pressure_override is not None:
        return spec.pressure_override
    return GRAVITY_N_PER_KG * spec.alpha * WATER_DENSITY_T_PER_M3 * spec.depth / 1000.0


def estimate_adsorbed_gas(
    toc: float,
    ro: float,
    temp: float,
    pressure: float,
    pl_model: FittedModel,
    vl_model: FittedModel,
) -> float:
    """Adsorbed gas content (m3/t) from geological parameters alone.

    The two fitted models supply the Langmuir parameters, then the isotherm
    is evaluated at the reservoir pressure.
    """
    if not pressure > 0:
        raise ValueError(f"pressure must be positive, got {pressure}")
    query = SampleRecord(id="query", reservoir="", toc=toc, temp=temp, ro=ro)
    params = LangmuirParams(pl=pl_model.predict(query), vl=vl_model.predict(query))
    return langmuir_volume(pressure, params)


@dataclass(frozen=True)
class EstimateRow:
    """One reservoir's resolved inputs and estimated adsorbed content."""

    reservoir: str
    depth_m: float
    toc_pct: float
    ro_pct: float
    temp_c: float
    pressure_mpa: float
    adsorbed_m3t: float
    warnings: tuple[str, ...]


def fit_range_warnings(toc: float, ro: float, temp: float) -> tuple[str, ...]:
    """Warning codes for inputs outside the ranges the models were fitted on."""
    warnings = []
    if not temp < FIT_RANGE_TEMP_MAX_C:
        warnings.append(WARN_TEMP)
    if not ro < FIT_RANGE_RO_MAX_PCT:
        warnings.append(WARN_RO)
    if not FIT_RANGE_TOC_PCT[0] <= toc <= FIT_RANGE_TOC_PCT[1]:
        warnings.append(WARN_TOC)
    return tuple(warnings)


def estimate_reservoir(
    spec: ReservoirSpec,
    pl_model: FittedModel,
    vl_model: FittedModel,
) -> EstimateRow:
    """Resolve temperature and pressure for one reservoir and estimate content."""
    temp = reservoir_temperature(spec)
    pressure = reservoir_pressure(spec)
    content = estimate_adsorbed_gas(spec.toc, spec.ro, temp, pressure, pl_model, vl_model)
    return EstimateRow(
        reservoir=spec.name,
        depth_m=spec.depth,
        toc_pct=spec.toc,
        ro_pct=spec.ro,
        temp_c=temp,
        pressure_mpa=pressure,
        adsorbed_m3t=content,
        warnings=fit_range_warnings(spec.toc, spec.ro, temp),
    )


def estimates_to_csv(rows: Sequence[EstimateRow]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(ESTIMATES_CSV_COLUMNS)
    for row in rows:
        writer.writerow([
            row.reservoir, repr(row.depth_m), repr(row.toc_pct), repr(row.ro_pct),
            repr(row.temp_c), repr(row.pressure_mpa), repr(row.adsorbed_m3t),
            ";".join(row.warnings),
        ])
    return out.getvalue()


_RESERVOIR_KEYS = {
    "name", "depth_m", "toc_pct", "ro_pct", "alpha",
    "surface_temp_c", "gradt_c_per_km", "temp_c", "pressure_mpa",
}


def parse_reservoirs(text: str) -> list[ReservoirSpec]:
    """Parse a key-value reservoir config: one block per reservoir.

    Blocks are separated by blank lines (a repeated ``name=`` also starts a
    new block); ``#`` starts a comment line. Keys: name, depth_m, toc_pct,
    ro_pct, alpha, surface_temp_c, gradt_c_per_km, temp_c, pressure_mpa.
    """
    blocks: list[dict[str, str]] = []
    current: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            if current:
                blocks.append(current)
                current = {}
            continue
        if line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"reservoir config line {lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _RESERVOIR_KEYS:
            raise ValueError(f"reservoir config line {lineno}: unknown key {key!r}")
        if key == "name" and current:
            blocks.append(current)
            current = {}
        if key in current:
            raise ValueError(f"reservoir config line {lineno}: duplicate key {key!r} in block")
        current[key] = value
    if current:
        blocks.append(current)

    specs = []
    for block in blocks:
        if "name" not in block:
            raise ValueError("reservoir config block is missing the name key")
        name = block["name"]

        def number(key: str, default: float | None = None) -> float | None:
            if key not in block:
                return default
            try:
                return float(block[key])
            except ValueError:
                raise ValueError(f"reservoir {name}: {key} is not a number: {block[key]!r}") from None

        for required in ("depth_m", "toc_pct", "ro_pct"):
            if required not in block:
                raise ValueError(f"reservoir {name}: missing required key {required}")
        specs.append(ReservoirSpec(
            name=name,
            depth=number("depth_m"),
            toc=number("toc_pct"),
            ro=number("ro_pct"),
            alpha=number("alpha", 1.0),
            surface_temp=number("surface_temp_c", DEFAULT_SURFACE_TEMP_C),
            grad_t=number("gradt_c_per_km"),
            temp_override=number("temp_c"),
            pressure_override=number("pressure_mpa"),
        ))
    return specs
