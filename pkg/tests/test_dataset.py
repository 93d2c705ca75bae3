import math
from types import SimpleNamespace

import numpy as np
import pytest

from shale_adsorb.dataset import (
    REASON_MISSING,
    REASON_PL,
    REASON_RO,
    REASON_TEMP,
    REASON_TOC,
    REASON_VL,
    DatasetKind,
    SampleParseError,
    SampleRecord,
    clean,
    clean_pl,
    clean_vl,
    correlation_table,
    integrate_replicates,
    parse_samples,
    pearson_correlation,
    records_to_csv,
    to_dimensionless,
)
from conftest import make_record

HEADER = "id,reservoir,toc_pct,ro_pct,temp_c,porosity_pct,pl_mpa,vl_m3t"


class TestParseSamples:
    def test_basic_row(self):
        records = parse_samples(HEADER + "\ns1,Barnett,4.0,1.5,48,,5.0,2.0\n")
        assert len(records) == 1
        rec = records[0]
        assert rec.id == "s1"
        assert rec.reservoir == "Barnett"
        assert rec.toc == 4.0
        assert rec.ro == 1.5
        assert rec.temp == 48.0
        assert rec.porosity is None
        assert rec.pl == 5.0
        assert rec.vl == 2.0

    def test_header_only(self):
        assert parse_samples(HEADER + "\n") == []

    def test_non_numeric_required_field(self):
        with pytest.raises(SampleParseError) as err:
            parse_samples(HEADER + "\ns1,Barnett,abc,1.5,48,,5.0,2.0\n")
        assert "row 2" in str(err.value)
        assert "toc" in str(err.value)
        assert err.value.row == 2

    def test_empty_required_field(self):
        with pytest.raises(SampleParseError, match="temp_c"):
            parse_samples(HEADER + "\ns1,Barnett,4.0,1.5,,,5.0,2.0\n")

    def test_row_with_wrong_field_count(self):
        with pytest.raises(SampleParseError, match="row 3"):
            parse_samples(HEADER + "\ns1,Barnett,4.0,1.5,48,,5.0,2.0\ns2,Barnett,4.0\n")

    def test_bad_header(self):
        with pytest.raises(SampleParseError, match="header"):
            parse_samples("id,toc\ns1,4.0\n")

    def test_invariant_violation_cites_row(self):
        with pytest.raises(SampleParseError, match="row 2"):
            parse_samples(HEADER + "\ns1,Barnett,-4.0,1.5,48,,5.0,2.0\n")

    def test_blank_lines_skipped(self):
        records = parse_samples(HEADER + "\n\ns1,Barnett,4.0,,48,,,\n\n")
        assert [r.id for r in records] == ["s1"]

    def test_order_preserved_and_roundtrip(self):
        records = [
            make_record(1, toc=4.0, temp=48.0, ro=1.5, pl=5.0, vl=2.0),
            make_record(2, toc=2.0, temp=60.0),
            make_record(3, toc=8.0, temp=24.0, porosity=3.5, vl=1.6),
        ]
        again = parse_samples(records_to_csv(records))
        assert again == records

    def test_accepts_line_iterable(self):
        lines = [HEADER + "\n", "s1,Barnett,4.0,1.5,48,,5.0,2.0\n"]
        assert len(parse_samples(lines)) == 1


class TestRecordInvariants:
    def test_rejects_nonpositive_toc(self):
        with pytest.raises(ValueError, match="toc"):
            make_record(1, toc=0.0, temp=48.0)

    def test_rejects_sub_absolute_zero_temp(self):
        with pytest.raises(ValueError, match="temp"):
            make_record(1, toc=4.0, temp=-300.0)

    @pytest.mark.parametrize("field", ["ro", "pl", "vl"])
    def test_rejects_nonpositive_optionals(self, field):
        with pytest.raises(ValueError, match=field):
            make_record(1, toc=4.0, temp=48.0, **{field: -1.0})

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError, match="finite"):
            make_record(1, toc=math.inf, temp=48.0)


class TestCleanPl:
    def test_in_bounds_kept(self):
        outcome = clean_pl([make_record(1, toc=4, ro=1.5, temp=48, pl=5.0)])
        assert len(outcome.kept) == 1 and not outcome.rejected

    @pytest.mark.parametrize("kwargs,reason", [
        (dict(toc=4, ro=1.5, temp=95, pl=5.0), REASON_TEMP),
        (dict(toc=0.5, ro=1.5, temp=48, pl=5.0), REASON_TOC),
        (dict(toc=4, temp=48, pl=5.0), REASON_MISSING),          # ro absent
        (dict(toc=4, ro=1.5, temp=48), REASON_MISSING),          # pl absent
        (dict(toc=4, ro=4.0, temp=48, pl=5.0), REASON_RO),       # strict bound
        (dict(toc=4, ro=1.5, temp=90.0, pl=5.0), REASON_TEMP),   # strict bound
        (dict(toc=4, ro=1.5, temp=48, pl=1.5), REASON_PL),       # strict bound
        (dict(toc=4, ro=1.5, temp=48, pl=12.0), REASON_PL),      # strict bound
        (dict(toc=17.5, ro=1.5, temp=48, pl=5.0), REASON_TOC),
    ])
    def test_rejections(self, kwargs, reason):
        outcome = clean_pl([make_record(1, **kwargs)])
        assert not outcome.kept
        assert outcome.rejected[0][1] == reason

    @pytest.mark.parametrize("toc", [1.0, 17.0])
    def test_toc_interval_inclusive(self, toc):
        outcome = clean_pl([make_record(1, toc=toc, ro=1.5, temp=48, pl=5.0)])
        assert len(outcome.kept) == 1

    def test_first_failing_reason_wins(self):
        # violates temp, ro and toc; evaluation order reports temp first
        outcome = clean_pl([make_record(1, toc=0.5, ro=5.0, temp=95, pl=5.0)])
        assert outcome.rejected[0][1] == REASON_TEMP


class TestCleanVl:
    def test_in_bounds_kept(self):
        outcome = clean_vl([make_record(1, toc=4, temp=48, vl=2.0)])
        assert len(outcome.kept) == 1

    @pytest.mark.parametrize("kwargs,reason", [
        (dict(toc=4, temp=48, vl=0.8), REASON_VL),
        (dict(toc=18, temp=48, vl=2.0), REASON_TOC),
        (dict(toc=4, temp=48), REASON_MISSING),
        (dict(toc=4, temp=92, vl=2.0), REASON_TEMP),
        (dict(toc=4, temp=48, vl=1.0), REASON_VL),   # strict bound
    ])
    def test_rejections(self, kwargs, reason):
        outcome = clean_vl([make_record(1, **kwargs)])
        assert outcome.rejected[0][1] == reason

    def test_ro_not_required(self):
        outcome = clean_vl([make_record(1, toc=4, temp=48, vl=2.0)])
        assert len(outcome.kept) == 1


def _random_records(seed, n=60):
    rng = np.random.default_rng(seed)
    records = []
    for i in range(n):
        records.append(make_record(
            i,
            toc=float(rng.uniform(0.2, 20.0)),
            temp=float(rng.uniform(20.0, 110.0)),
            ro=float(rng.uniform(0.3, 5.0)) if rng.random() < 0.8 else None,
            pl=float(rng.uniform(0.5, 15.0)) if rng.random() < 0.8 else None,
            vl=float(rng.uniform(0.5, 6.0)) if rng.random() < 0.8 else None,
        ))
    return records


@pytest.mark.parametrize("kind", [DatasetKind.PL, DatasetKind.VL])
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_cleaning_partitions_input(kind, seed):
    records = _random_records(seed)
    outcome = clean(records, kind)
    rejected_records = [rec for rec, _ in outcome.rejected]
    assert sorted(r.id for r in outcome.kept + rejected_records) == sorted(r.id for r in records)
    assert not set(r.id for r in outcome.kept) & set(r.id for r in rejected_records)


@pytest.mark.parametrize("kind", [DatasetKind.PL, DatasetKind.VL])
def test_cleaning_idempotent(kind):
    records = _random_records(seed=7)
    first = clean(records, kind)
    second = clean(first.kept, kind)
    assert second.kept == first.kept
    assert not second.rejected


class TestIntegrateReplicates:
    def test_exact_duplicate_dropped(self):
        a = make_record(1, toc=4, temp=48, pl=5.0)
        b = SampleRecord(id="other-id", reservoir="r", toc=4, temp=48, pl=5.0)
        unique, dropped = integrate_replicates([a, b])
        assert unique == [a]
        assert dropped == [b]

    def test_different_reservoir_not_a_duplicate(self):
        a = make_record(1, toc=4, temp=48, reservoir="A")
        b = make_record(2, toc=4, temp=48, reservoir="B")
        unique, dropped = integrate_replicates([a, b])
        assert unique == [a, b] and not dropped


class TestToDimensionless:
    def test_normalising_constants(self):
        dv = to_dimensionless(make_record(1, toc=4.0, temp=48.0, ro=1.75))
        assert (dv.toc_star, dv.t_star, dv.ro_star) == (1.0, 1.0, 1.0)

    def test_reference_reservoir_inputs(self):
        dv = to_dimensionless(make_record(1, toc=2.58, temp=86.98, ro=3.03))
        assert dv.toc_star == pytest.approx(2.58 / 4.0, rel=1e-15)
        assert dv.t_star == pytest.approx(86.98 / 48.0, rel=1e-15)
        assert dv.ro_star == pytest.approx(3.03 / 1.75, rel=1e-15)

    def test_absent_ro_stays_absent(self):
        dv = to_dimensionless(make_record(1, toc=8.0, temp=24.0))
        assert (dv.toc_star, dv.t_star, dv.ro_star) == (2.0, 0.5, None)

    def test_linear_in_toc(self):
        base = to_dimensionless(make_record(1, toc=3.1, temp=50.0))
        doubled = to_dimensionless(make_record(1, toc=6.2, temp=50.0))
        assert doubled.toc_star == pytest.approx(2 * base.toc_star, rel=1e-15)

    def test_missing_inputs_rejected(self):
        broken = SimpleNamespace(toc=None, temp=48.0, ro=None)
        with pytest.raises(ValueError, match="toc and temp"):
            to_dimensionless(broken)


class TestPearsonCorrelation:
    def test_perfect_positive(self):
        assert pearson_correlation([1, 2, 3], [2, 4, 6]) == pytest.approx(1.0)

    def test_perfect_negative(self):
        assert pearson_correlation([1, 2, 3], [6, 4, 2]) == pytest.approx(-1.0)

    def test_four_point_oracle(self):
        # Hand evaluation: centred cross products sum to 4.0 and both
        # centred sums of squares are 5.0, so r = 4 / sqrt(25) = 0.8.
        assert pearson_correlation([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(0.8, abs=1e-15)

    def test_self_correlation_is_one(self):
        rng = np.random.default_rng(3)
        x = rng.normal(size=25)
        assert pearson_correlation(x, x) == pytest.approx(1.0, abs=1e-12)

    def test_symmetry(self):
        rng = np.random.default_rng(4)
        x = rng.normal(size=20)
        y = rng.normal(size=20)
        assert pearson_correlation(x, y) == pytest.approx(pearson_correlation(y, x), abs=1e-15)

    def test_affine_invariance_positive_slope(self):
        rng = np.random.default_rng(5)
        x = rng.normal(size=20)
        y = rng.normal(size=20)
        r = pearson_correlation(x, y)
        assert pearson_correlation(3.5 * x + 2.0, y) == pytest.approx(r, abs=1e-12)

    def test_zero_variance_rejected(self):
        with pytest.raises(ValueError, match="variance"):
            pearson_correlation([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError, match="length"):
            pearson_correlation([1, 2], [1, 2, 3])

    def test_too_short_rejected(self):
        with pytest.raises(ValueError, match="two points"):
            pearson_correlation([1.0], [2.0])


class TestCorrelationTable:
    def test_pairwise_complete_sizes(self):
        records = [
            make_record(1, toc=2, temp=40, ro=1.0, porosity=2.0),
            make_record(2, toc=3, temp=50, ro=1.5),
            make_record(3, toc=4, temp=60, porosity=4.0),
            make_record(4, toc=5, temp=70),
        ]
        rows = {(r.var_a, r.var_b): r for r in correlation_table(records)}
        assert rows[("temp", "toc")].n == 4
        assert rows[("temp", "ro")].n == 2
        assert rows[("toc", "porosity")].n == 2
        assert rows[("ro", "porosity")].n == 1
        assert rows[("ro", "porosity")].abs_r is None

    def test_abs_r_is_absolute(self):
        records = [make_record(i, toc=float(i + 1), temp=80.0 - 10 * i) for i in range(4)]
        rows = {(r.var_a, r.var_b): r for r in correlation_table(records)}
        assert rows[("temp", "toc")].abs_r == pytest.approx(1.0)
