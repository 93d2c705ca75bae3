#!/usr/bin/env python3
"""Regenerate the bundled fixture files under data/.

The sample fixture is drawn with a fixed seed and generated noiselessly
from the reference coefficient sets, so the fitting pipeline recovers those
coefficients exactly and every scenario pool is populated. Rerunning this
script reproduces the committed files byte for byte.
"""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from shale_adsorb.dataset import DatasetKind, SampleRecord, clean_pl, clean_vl, records_to_csv
from shale_adsorb.estimator import reference_models
from shale_adsorb.outliers import detect_outliers

SEED = 20240801
N_SAMPLES = 48

DATA_DIR = Path(__file__).resolve().parents[1] / "data"

RESERVOIRS = [
    # name, depth_m, toc_pct, ro_pct, temp_c
    ("Sichuan Basin", 3230, 2.58, 3.03, 86.98),
    ("Yangtze Platform", 1737, 3.53, 2.37, 57.48),
    ("Songliao Basin", 1731, 2.93, 1.03, 90.46),
    ("Ordos Basin", 2730, 4.69, 1.53, 86.93),
    ("Tarim Basin", 4023, 4.65, 1.57, 95.99),
    ("Northern Jiangsu Basin", 2872, 2.05, 1.54, 106.19),
    ("Marcellus Shale", 2057, 3.12, 2.10, 87.26),
    ("Barnett Shale", 2286, 6.90, 1.20, 83.23),
    ("Posidonia Shale", 53, 8.14, 0.96, 22.66),
]


def make_samples() -> list[SampleRecord]:
    pl_model, vl_model = reference_models()
    rng = np.random.default_rng(SEED)
    records = []
    while len(records) < N_SAMPLES:
        toc = round(float(rng.uniform(1.5, 12.0)), 2)
        ro = round(float(rng.uniform(0.8, 3.5)), 2)
        temp = round(float(rng.uniform(30.0, 88.0)), 2)
        rec = SampleRecord(id=f"s{len(records) + 1:02d}", reservoir="synthetic",
                           toc=toc, temp=temp, ro=ro)
        pl = pl_model.predict(rec)
        vl = vl_model.predict(rec)
        if not (1.6 < pl < 11.5 and vl > 1.05):
            continue
        records.append(SampleRecord(id=rec.id, reservoir=rec.reservoir,
                                    toc=toc, temp=temp, ro=ro, pl=pl, vl=vl))
    return records


def check_samples(records: list[SampleRecord]) -> None:
    assert len(clean_pl(records).rejected) == 0
    assert len(clean_vl(records).rejected) == 0
    pools = {
        "high-t": sum(1 for r in records if r.temp > 65),
        "high-toc": sum(1 for r in records if r.toc > 5),
        "high-ro": sum(1 for r in records if r.ro > 2),
    }
    for name, count in pools.items():
        assert count >= 12, f"{name} pool too small: {count}"
    for kind in (DatasetKind.PL, DatasetKind.VL):
        report = detect_outliers(records, kind)
        assert not any(report.flagged), f"{kind} fixture flags outliers"
        assert max(report.r_values) < 0.5, f"{kind} fixture R too close to threshold"


def write_reservoirs() -> None:
    lines = ["# Nine reference reservoirs: pressure derives from depth (alpha=1),",
             "# temperature is supplied directly.", ""]
    for name, depth, toc, ro, temp in RESERVOIRS:
        lines += [f"name={name}", f"depth_m={depth}", f"toc_pct={toc}",
                  f"ro_pct={ro}", f"temp_c={temp}", ""]
    (DATA_DIR / "reservoirs.conf").write_text("\n".join(lines), encoding="utf-8")


def write_heatflow() -> None:
    rng = np.random.default_rng(SEED + 1)
    rows = ["lon_deg,lat_deg,section_depth_m,gradt_c_per_km"]
    for _ in range(20):
        lon = round(float(rng.uniform(100.0, 112.0)), 3)
        lat = round(float(rng.uniform(24.0, 34.0)), 3)
        depth = round(float(rng.uniform(100.0, 3200.0)), 0)
        grad = round(float(rng.uniform(15.0, 35.0)), 2)
        rows.append(f"{lon},{lat},{depth},{grad}")
    (DATA_DIR / "heatflow.csv").write_text("\n".join(rows) + "\n", encoding="utf-8")


def main() -> None:
    DATA_DIR.mkdir(exist_ok=True)
    records = make_samples()
    check_samples(records)
    (DATA_DIR / "samples.csv").write_text(records_to_csv(records), encoding="utf-8")
    write_reservoirs()
    write_heatflow()
    print(f"wrote {len(records)} samples, {len(RESERVOIRS)} reservoirs, 20 heat-flow points to {DATA_DIR}")


if __name__ == "__main__":
    main()
