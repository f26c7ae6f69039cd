import csv
import json
import math

import pytest

from spacegof.powerlab import (
    CSV_FIELDS,
    PowerStudyConfig,
    compare_with_reference,
    estimate_power,
    format_table,
    reference_grid_config,
    reference_power,
    run_study,
    run_study_tails,
    with_overrides,
    write_csv,
    write_json,
)

SMALL = PowerStudyConfig(
    reps=2000,
    critical_reps=4000,
    alternatives=("beta:0.5,0.5", "uniform"),
    m_values=(1, 4),
    r_values=(1.0, 2.0),
    seed=20241014,
)


@pytest.fixture(scope="module")
def small_tables():
    return run_study(SMALL)


def test_reference_lookup():
    assert reference_power("beta:0.5,0.5", 4, "overlapping", 2.0) == 0.7093
    assert reference_power("beta:1,3", 1, "overlapping", 1.0) == 0.9946
    assert reference_power("beta:3,3", 5, "disjoint", 1.0) == 0.0052
    assert reference_power("beta:3,3", 3, "disjoint", 1.0) is None
    assert reference_power("uniform", 1, "disjoint", 1.0) is None


def test_config_validation():
    with pytest.raises(ValueError):
        PowerStudyConfig(alpha=1.5)
    with pytest.raises(ValueError):
        PowerStudyConfig(reps=0)
    with pytest.raises(ValueError):
        PowerStudyConfig(schemes=("diagonal",))
    assert with_overrides(SMALL, reps=10, tail=None).reps == 10


def test_m1_schemes_agree_exactly(small_tables):
    for t in small_tables:
        for r in SMALL.r_values:
            assert t.cell(1, "disjoint", r).power == t.cell(1, "overlapping", r).power


def test_size_row(small_tables):
    uniform = [t for t in small_tables if t.alternative == "uniform"][0]
    # the critical value is itself estimated, which adds alpha(1-alpha)/critical_reps
    se = math.sqrt(0.05 * 0.95 * (1 / SMALL.reps + 1 / SMALL.critical_reps))
    for row in uniform.rows:
        assert abs(row.power - 0.05) < 3 * se, row


def test_records_are_consistent(small_tables):
    for t in small_tables:
        for row in t.rows:
            assert 0.0 <= row.power <= 1.0
            assert row.std_error == pytest.approx(math.sqrt(row.power * (1 - row.power) / SMALL.reps))
            assert row.critical_method == "monte_carlo" and row.tail == "upper"


def test_heavy_tail_ordering(small_tables):
    t = [t for t in small_tables if t.alternative == "beta:0.5,0.5"][0]
    hi, lo = t.cell(4, "overlapping", 1.0), t.cell(1, "overlapping", 2.0)
    assert hi.power - lo.power > 3 * math.hypot(hi.std_error, lo.std_error)


def test_small_n_flag():
    cfg = with_overrides(SMALL, m_values=(10,), r_values=(2.0,), alternatives=("uniform",), reps=200, critical_reps=1000)
    rows = run_study(cfg)[0].rows
    disjoint = [r for r in rows if r.scheme == "disjoint"][0]
    overlapping = [r for r in rows if r.scheme == "overlapping"][0]
    assert disjoint.spacings == 5 and disjoint.small_n
    assert overlapping.spacings == 41 and not overlapping.small_n


def test_threads_do_not_change_results(small_tables):
    threaded = run_study(with_overrides(SMALL, threads=3))
    assert [r.to_dict() for t in threaded for r in t.rows] == [r.to_dict() for t in small_tables for r in t.rows]


def test_tails_share_simulations(small_tables):
    both = run_study_tails(SMALL, ["upper", "two_sided"])
    assert [r.power for t in both["upper"] for r in t.rows] == [r.power for t in small_tables for r in t.rows]
    two = run_study(with_overrides(SMALL, tail="two_sided"))
    assert [r.to_dict() for t in both["two_sided"] for r in t.rows] == [r.to_dict() for t in two for r in t.rows]


def test_estimate_power_matches_study_cell(small_tables):
    rec = estimate_power(SMALL, "beta:0.5,0.5", 4, "overlapping", 2.0)
    assert rec == small_tables[0].cell(4, "overlapping", 2.0)


def test_compare_with_reference(small_tables):
    found = compare_with_reference(small_tables, 0.05)
    assert {d.m for d in found} == {1, 4}
    assert all(d.scheme == "overlapping" and d.alternative == "beta:0.5,0.5" for d in found)
    for d in found:
        assert d.within == (abs(d.difference) <= 0.05)


def test_outputs(tmp_path, small_tables):
    write_csv(small_tables, tmp_path / "p.csv")
    write_json(small_tables, SMALL, tmp_path / "p.json", {"note": "x"})
    with open(tmp_path / "p.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == CSV_FIELDS
    assert len(rows) == 1 + sum(len(t.rows) for t in small_tables)
    doc = json.loads((tmp_path / "p.json").read_text())
    assert doc["config"]["seed"] == 20241014 and doc["note"] == "x"
    assert "internal n" in doc["metadata"]["n_convention"]
    # rerunning gives byte-identical files
    write_csv(run_study(SMALL), tmp_path / "q.csv")
    assert (tmp_path / "p.csv").read_bytes() == (tmp_path / "q.csv").read_bytes()
    assert "beta:0.5,0.5" in format_table(small_tables[0])


def test_reference_grid_config():
    cfg = reference_grid_config(include_size_row=True)
    assert cfg.n == 50 and cfg.m_values == (1, 2, 4, 5, 10) and cfg.alternatives[-1] == "uniform"
